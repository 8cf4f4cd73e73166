#include <doctest.h>

#include <random>
#include <unordered_set>

#include "rfg/experiments.hpp"
#include "rfg/mgroup.hpp"
#include "test_util.hpp"

using namespace rfg;
using rfg::test::vec;

namespace {

GroupElement el(const MGroup& G, Vec k, std::vector<i64> h = {}, int f = 0) {
  GroupElement g = G.from_k(k);
  if (!h.empty()) g.h = h;
  g.f = f;
  return g;
}

// Z^2 ⋊ Z/2 with the flip acting by -I.
MGroupDescription flip_group() {
  MGroupDescription d;
  d.name = "z2_flip";
  d.dim_k = 2;
  d.rank_h = 0;
  FinitePart F;
  F.order = 2;
  F.table = {{0, 1}, {1, 0}};
  RatMatrix neg = RatMatrix::identity(2);
  neg(0, 0) = -1;
  neg(1, 1) = -1;
  F.actions = {RatMatrix::identity(2), neg};
  d.finite_part = F;
  return d;
}

}  // namespace

TEST_SUITE("mgroup") {
  TEST_CASE("multiplication in BS(1,2)") {
    MGroup G = test::catalog("bs12");
    GroupElement x = el(G, vec({"1"}), {0}), y = el(G, vec({"0"}), {1});
    CHECK(G.multiply(y, x) == el(G, vec({"2"}), {1}));
    CHECK(G.multiply(x, G.identity()) == x);
    CHECK(G.multiply(G.invert(y), x) == el(G, vec({"1/2"}), {-1}));
    // y x y^-1 = x^2.
    CHECK(G.multiply(G.multiply(y, x), G.invert(y)) == G.power(x, 2));
  }

  TEST_CASE("inverses") {
    MGroup G = test::catalog("bs12");
    CHECK(G.invert(G.identity()) == G.identity());
    CHECK(G.invert(el(G, vec({"1"}), {0})) == el(G, vec({"-1"}), {0}));
    GroupElement g = el(G, vec({"1"}), {1});
    CHECK(G.invert(g) == el(G, vec({"-1/2"}), {-1}));
    CHECK(G.is_identity(G.multiply(g, G.invert(g))));
  }

  TEST_CASE("powers") {
    MGroup G = test::catalog("bs12");
    GroupElement x = el(G, vec({"1"}), {0});
    CHECK(G.power(x, 0) == G.identity());
    CHECK(G.power(x, 60) == el(G, vec({"60"}), {0}));
    GroupElement g = el(G, vec({"3/2"}), {2});
    GroupElement acc = G.identity();
    for (int t = 1; t <= 9; ++t) {
      acc = G.multiply(acc, g);
      CHECK(G.power(g, t) == acc);
    }
    CHECK(G.power(g, -3) == G.invert(G.power(g, 3)));

    MGroup H = test::catalog("heisenberg");
    GroupElement ab = H.multiply(H.generators()[0], H.generators()[1]);
    CHECK(ab.k == vec({"1", "1", "1/2"}));
    CHECK(H.power(ab, 2).k == vec({"2", "2", "1"}));
  }

  TEST_CASE("ball sizes") {
    MGroup G = test::catalog("bs12");
    Ball B = enumerate_ball(G, 2);
    CHECK(B.size(0) == 1);
    CHECK(B.size(1) == 5);
    CHECK(B.size(2) == 17);
  }

  TEST_CASE("BS(1,2) balls match exact rational arithmetic") {
    MGroup G = test::catalog("bs12");
    Ball B = enumerate_ball(G, 8);
    auto model = test::bs_model_ball_sizes(8);
    for (int r = 0; r <= 8; ++r) CHECK(B.size(r) == model[static_cast<std::size_t>(r)]);
    for (const auto& g : B.elements) CHECK(g.h.size() == 1);
  }

  TEST_CASE("Heisenberg balls match unitriangular integer matrices") {
    MGroup G = test::catalog("heisenberg");
    Ball B = enumerate_ball(G, 6);
    auto model = test::heisenberg_matrix_ball_sizes(6);
    for (int r = 0; r <= 6; ++r) CHECK(B.size(r) == model[static_cast<std::size_t>(r)]);
    // Element-wise: each ball element is an integer matrix of the model.
    for (const auto& g : B.elements) {
      test::Uni u = test::uni_exp(g.k);
      CHECK(u.c.get_den() == 1);
    }
  }

  TEST_CASE("parallel and serial balls are identical") {
    for (const char* name : {"bs12", "z2_fibonacci", "heisenberg", "heis_x_z2A"}) {
      MGroup G = test::catalog(name);
      BallOptions par, ser;
      par.threads = 4;
      ser.parallel = false;
      Ball a = enumerate_ball(G, 4, par), b = enumerate_ball(G, 4, ser);
      CHECK(a.elements == b.elements);
      CHECK(a.norm == b.norm);
      CHECK(a.layer_end == b.layer_end);
    }
  }

  TEST_CASE("balls are monotone and symmetric") {
    for (const char* name : {"bs12", "z2_fibonacci", "heisenberg", "z2_trivial", "heis_x_z2A"}) {
      MGroup G = test::catalog(name);
      Ball B = enumerate_ball(G, 4);
      std::unordered_set<GroupElement, GroupElementHash> all(B.elements.begin(), B.elements.end());
      CHECK(all.size() == B.elements.size());
      for (int r = 1; r <= 4; ++r) CHECK(B.size(r - 1) <= B.size(r));
      for (std::size_t i = 0; i < B.elements.size(); ++i) {
        GroupElement inv = G.invert(B.elements[i]);
        REQUIRE(all.count(inv) == 1);
      }
      CHECK(G.is_identity(B.elements[0]));
    }
  }

  TEST_CASE("budget guard on balls") {
    MGroup G = test::catalog("bs12");
    BallOptions tiny;
    tiny.budget = 10;
    CHECK_THROWS_AS(enumerate_ball(G, 5, tiny), BudgetError);
  }

  TEST_CASE("group axioms on sampled triples") {
    std::mt19937_64 rng(77);
    for (const char* name : {"bs12", "z2_fibonacci", "heisenberg", "z2_trivial", "heis_x_z2A"}) {
      MGroup G = test::catalog(name);
      Ball B = enumerate_ball(G, 4);
      std::uniform_int_distribution<std::size_t> pick(0, B.elements.size() - 1);
      for (int t = 0; t < 1000; ++t) {
        const auto& a = B.elements[pick(rng)];
        const auto& b = B.elements[pick(rng)];
        const auto& c = B.elements[pick(rng)];
        REQUIRE(G.multiply(G.multiply(a, b), c) == G.multiply(a, G.multiply(b, c)));
        REQUIRE(G.multiply(a, G.identity()) == a);
        REQUIRE(G.multiply(G.identity(), a) == a);
        REQUIRE(G.is_identity(G.multiply(a, G.invert(a))));
      }
    }
  }

  TEST_CASE("catalog relators evaluate to the identity") {
    for (const char* name : {"bs12", "z2_fibonacci", "heisenberg", "z2_trivial", "heis_x_z2A"}) {
      MGroup G = test::catalog(name);
      CHECK_FALSE(G.description().relators.empty());
      for (const auto& w : G.description().relators) CHECK(G.is_identity(G.evaluate_word(w)));
    }
  }

  TEST_CASE("validation failures") {
    MGroupDescription bs = read_group_description(catalog_path("bs12.json"));
    CHECK(validate(bs).ok);

    auto d = bs;
    d.actions[0](0, 0) = 3;  // inverse 1/3 is outside Z[1/2]
    CHECK_FALSE(validate(d).ok);
    CHECK_THROWS_AS(MGroup{d}, ValidationFailure);

    d = bs;
    d.generators = std::vector<GroupElement>{{vec({"1/3"}), {0}, 0}};
    CHECK_FALSE(validate(d).ok);

    d = bs;
    d.relators = {{1, 2}};
    CHECK_FALSE(validate(d).ok);

    MGroupDescription h = read_group_description(catalog_path("heisenberg.json"));
    h.rank_h = 1;
    RatMatrix s = RatMatrix::identity(3);
    s(0, 0) = 2;  // not a bracket automorphism
    h.actions = {s};
    h.relators.clear();
    CHECK_FALSE(validate(h).ok);

    MGroupDescription f = read_group_description(catalog_path("z2_fibonacci.json"));
    f.rank_h = 2;
    RatMatrix sw = RatMatrix::identity(2);
    sw(0, 0) = 0;
    sw(0, 1) = 1;
    sw(1, 0) = 1;
    sw(1, 1) = 0;
    f.actions.push_back(sw);  // does not commute with the first action
    f.relators.clear();
    CHECK_FALSE(validate(f).ok);

    MGroupDescription c = read_group_description(catalog_path("heisenberg.json"));
    c.nilpotency_class = 1;
    CHECK_FALSE(validate(c).ok);
  }

  TEST_CASE("finite parts") {
    MGroupDescription d = flip_group();
    REQUIRE(validate(d).ok);
    MGroup G(d);
    CHECK(G.generators().size() == 3);
    GroupElement t = el(G, vec({"1", "0"}), {}, 0), s = el(G, vec({"0", "0"}), {}, 1);
    CHECK(G.multiply(s, t) == el(G, vec({"-1", "0"}), {}, 1));
    CHECK(G.is_identity(G.power(s, 2)));
    CHECK(G.multiply(G.multiply(s, t), G.invert(s)) == G.invert(t));
    Ball B = enumerate_ball(G, 3);
    for (const auto& g : B.elements) CHECK(G.is_identity(G.multiply(g, G.invert(g))));

    auto bad = d;
    bad.finite_part->table = {{0, 1}, {1, 1}};
    CHECK_FALSE(validate(bad).ok);
    bad = d;
    bad.finite_part->actions[1] = RatMatrix::identity(2);
    bad.finite_part->actions[1](0, 0) = 2;
    CHECK_FALSE(validate(bad).ok);
  }

  TEST_CASE("coordinate forms") {
    MGroup bs = test::catalog("bs12");
    auto cf = coordinate_form(bs.from_k(vec({"3/4"})), bs);
    CHECK(cf.mu == std::vector<Integer>{3});
    CHECK(cf.j == 2);

    MGroup z2 = test::catalog("z2_trivial");
    cf = coordinate_form(z2.from_k(vec({"5", "-7"})), z2);
    CHECK(cf.mu == std::vector<Integer>{5, -7});
    CHECK(cf.j == 0);
    CHECK(cf.gcd == 1);

    MGroup H = test::catalog("heisenberg");
    CHECK(H.ambient_delta() == 2);
    cf = coordinate_form(H.from_k(vec({"1", "0", "1/2"})), H);
    CHECK(cf.mu == std::vector<Integer>{2, 0, 1});
    CHECK(cf.j == 1);

    CHECK_THROWS_AS(coordinate_form(bs.identity(), bs), PreconditionError);
    GroupElement y = bs.identity();
    y.h[0] = 1;
    CHECK_THROWS_AS(coordinate_form(y, bs), PreconditionError);
  }

  TEST_CASE("coefficient growth") {
    MGroup bs = test::catalog("bs12");
    auto rows = coefficient_stats(bs, 10);
    REQUIRE(rows.size() == 11);
    std::vector<double> r, num, ks;
    for (const auto& row : rows) {
      if (row.r < 1) continue;
      r.push_back(row.r);
      num.push_back(row.max_numerator.get_d());
      ks.push_back(static_cast<double>(row.k_size));
    }
    auto fit = fit_exponent(r, num, GrowthModel::Exponential);
    CHECK(fit.exponent >= 0.25);
    CHECK(std::exp(fit_exponent(r, ks, GrowthModel::Exponential).exponent) > 1.05);

    MGroup fb = test::catalog("z2_fibonacci");
    auto frows = coefficient_stats(fb, 8);
    std::vector<double> fr, fk;
    for (const auto& row : frows)
      if (row.r >= 1) {
        fr.push_back(row.r);
        fk.push_back(static_cast<double>(row.k_size));
      }
    CHECK(std::exp(fit_exponent(fr, fk, GrowthModel::Exponential).exponent) > 1.05);

    MGroup H = test::catalog("heisenberg");
    auto hrows = coefficient_stats(H, 8);
    std::vector<double> hr, hn;
    for (const auto& row : hrows)
      if (row.r >= 1) {
        hr.push_back(row.r);
        hn.push_back(row.max_numerator.get_d());
      }
    CHECK(fit_exponent(hr, hn, GrowthModel::Polynomial).exponent <= 3);
    for (std::size_t i = 1; i < hrows.size(); ++i) CHECK(hrows[i].max_numerator >= hrows[i - 1].max_numerator);
  }

  TEST_CASE("lcm witnesses") {
    MGroup bs = test::catalog("bs12");
    GroupElement x = bs.from_k(vec({"1"}));
    CHECK(lcm_witness(bs, x, 6) == bs.from_k(vec({"60"})));
    CHECK(lcm_witness(bs, x, 1) == x);
  }
}
