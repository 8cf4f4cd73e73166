#include <doctest.h>

#include "rfg/modp.hpp"
#include "rfg/separator.hpp"
#include "test_util.hpp"

using namespace rfg;

namespace {

RatMatrix fib() {
  RatMatrix A = RatMatrix::identity(2);
  A(0, 0) = 2;
  A(0, 1) = 1;
  A(1, 0) = 1;
  A(1, 1) = 1;
  return A;
}

ModPLieRing abelian2(u64 p, std::vector<RatMatrix> actions = {}) {
  return reduce_mod_p(LieRing(2, {}), actions, p, Integer(1));
}

// Intersection of all ideals of codimension <= d.
std::vector<VecP> meet(const std::vector<IdealModP>& ideals, int d, int m, u64 p) {
  std::vector<VecP> inter;
  for (int i = 0; i < m; ++i) {
    VecP e(static_cast<std::size_t>(m), 0);
    e[static_cast<std::size_t>(i)] = 1;
    inter.push_back(e);
  }
  for (const auto& w : ideals)
    if (w.codim <= d) inter = intersect_mod_p(inter, w.basis, m, p);
  return inter;
}

}  // namespace

TEST_SUITE("modp") {
  TEST_CASE("reduction of catalog data") {
    ModPLieRing H = reduce_mod_p(test::heisenberg_ring(), {}, 5, Integer(2));
    CHECK(H.bracket({1, 0, 0}, {0, 1, 0}) == VecP{0, 0, 1});
    CHECK(H.bracket({0, 1, 0}, {1, 0, 0}) == VecP{0, 0, 4});

    MGroup bs = test::catalog("bs12");
    ModPLieRing B = reduce_mod_p(bs.lie(), bs.all_actions(), 3, bs.ambient_delta());
    CHECK(B.actions[0](0, 0) == 2);

    ModPLieRing F = abelian2(11, {fib()});
    CHECK(F.actions[0].a == std::vector<std::uint32_t>{2, 1, 1, 1});
    CHECK(inverse_mod_p(F.actions[0]) * F.actions[0] == MatP::identity(2, 11));

    CHECK_THROWS_AS(reduce_mod_p(test::heisenberg_ring(), {}, 2, Integer(2)), PreconditionError);
    CHECK_THROWS_AS(reduce_mod_p(test::heisenberg_ring(), {}, 9, Integer(1)), PreconditionError);
    RatMatrix sing = RatMatrix::identity(2);
    sing(0, 0) = 5;
    CHECK_THROWS_AS(abelian2(5, {sing}), PreconditionError);
  }

  TEST_CASE("linear algebra mod p") {
    auto r = rref_mod_p({{2, 4, 1}, {1, 2, 3}}, 7);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == VecP{1, 2, 0});
    CHECK(r[1] == VecP{0, 0, 1});
    CHECK(pivot_columns(r) == std::vector<int>{0, 2});
    auto i = intersect_mod_p({{1, 0, 0}, {0, 1, 0}}, {{0, 1, 0}, {0, 0, 1}}, 3, 7);
    REQUIRE(i.size() == 1);
    CHECK(i[0] == VecP{0, 1, 0});
    CHECK(intersect_mod_p({{1, 0}}, {{0, 1}}, 2, 5).empty());
  }

  TEST_CASE("invariant ideals of small rings") {
    auto ab = invariant_ideals_mod_p(abelian2(3));
    CHECK(ab.size() == 6);

    ModPLieRing H = reduce_mod_p(test::heisenberg_ring(), {}, 5, Integer(2));
    auto hi = invariant_ideals_mod_p(H);
    // {0}, span(v3), the six planes through v3 and the whole ring.
    CHECK(hi.size() == 9);
    for (const auto& w : hi)
      if (w.codim < 3) {
        CHECK(w.contains({0, 0, 1}, 5));
      }

    auto fi = invariant_ideals_mod_p(abelian2(3, {fib()}));
    REQUIRE(fi.size() == 2);
    CHECK(fi[0].codim == 2);
    CHECK(fi[1].codim == 0);

    // Output is canonically sorted.
    for (std::size_t k = 1; k < hi.size(); ++k) CHECK(hi[k - 1] < hi[k]);
  }

  TEST_CASE("parallel ideal search matches the exhaustive reference") {
    std::vector<ModPLieRing> rings = {
        abelian2(3), abelian2(7),
        abelian2(11, {fib()}), abelian2(5, {fib()}),
        reduce_mod_p(test::heisenberg_ring(), {}, 5, Integer(2)),
        reduce_mod_p(test::heisenberg_ring(), {}, 7, Integer(2)),
    };
    MGroup hz = test::catalog("heis_x_z2A");
    rings.push_back(reduce_mod_p(hz.lie(), hz.all_actions(), 7, hz.ambient_delta()));
    MGroup fr = test::catalog("z2_fibonacci");
    for (u64 p : {19ULL, 29ULL}) rings.push_back(reduce_mod_p(fr.lie(), fr.all_actions(), p, fr.ambient_delta()));
    for (const auto& Lp : rings) {
      IdealSearchOptions one;
      one.threads = 1;
      IdealSearchOptions four;
      four.threads = 4;
      auto fast = invariant_ideals_mod_p(Lp, four);
      CHECK(fast == invariant_ideals_exhaustive(Lp));
      CHECK(fast == invariant_ideals_mod_p(Lp, one));
      for (const auto& w : fast) CHECK(is_invariant_ideal(Lp, w.basis));
    }
  }

  TEST_CASE("budget guard") {
    IdealSearchOptions tiny;
    tiny.budget = 10;
    CHECK_THROWS_AS(invariant_ideals_mod_p(abelian2(11), tiny), BudgetError);
    CHECK_THROWS_AS(invariant_ideals_exhaustive(abelian2(11), 10), BudgetError);
  }

  TEST_CASE("delta values") {
    CHECK(delta_mod_p(abelian2(3)).delta_p == 1);
    CHECK(delta_mod_p(abelian2(13)).delta_p == 1);
    CHECK(delta_mod_p(abelian2(11, {fib()})).delta_p == 1);
    CHECK(delta_mod_p(abelian2(3, {fib()})).delta_p == 2);
    for (u64 p : primes_up_to(31)) {
      if (p < 5) continue;
      auto rep = delta_mod_p(reduce_mod_p(test::heisenberg_ring(), {}, p, Integer(2)));
      CHECK(rep.delta_p == 3);
      bool has_zero = false;
      for (const auto& w : rep.witness_family) has_zero = has_zero || w.basis.empty();
      CHECK(has_zero);
    }
  }

  TEST_CASE("delta witness family and monotone intersections") {
    for (const auto& Lp : {abelian2(11, {fib()}), reduce_mod_p(test::heisenberg_ring(), {}, 7, Integer(2)),
                           abelian2(5, {fib()})}) {
      auto ideals = invariant_ideals_mod_p(Lp);
      auto rep = delta_mod_p(Lp, ideals);
      std::size_t prev = static_cast<std::size_t>(Lp.dim);
      for (int d = 0; d <= Lp.dim; ++d) {
        std::size_t dim = meet(ideals, d, Lp.dim, Lp.prime).size();
        CHECK(dim <= prev);
        CHECK((dim == 0) == (d >= rep.delta_p));
        prev = dim;
      }
      for (const auto& w : rep.witness_family) CHECK(w.codim <= rep.delta_p);
    }
  }

  TEST_CASE("stable minimum over primes") {
    std::vector<DeltaReport> reps(3);
    reps[0].delta_p = 2;
    reps[1].delta_p = 1;
    reps[2].delta_p = 1;
    summarize_delta(reps);
    CHECK(reps[0].stable_min == 1);
    CHECK(reps[0].unstable);
    reps[0].delta_p = 1;
    summarize_delta(reps);
    CHECK_FALSE(reps[2].unstable);
  }

  TEST_CASE("matrix orders") {
    CHECK(matrix_order_mod_p(MatP::identity(3, 7), 7, 1000) == 1);
    MatP two(1, 7);
    two(0, 0) = 2;
    CHECK(matrix_order_mod_p(two, 7, 1000) == 3);
    MatP A = MatP::from_rational(fib(), 11);
    auto rep = matrix_order_report(A, 1000);
    CHECK(rep.order == 5);
    CHECK(rep.splits);
    CHECK(rep.diagonalizable);
    CHECK(rep.divides_p_minus_1);
    // Non-split: x^2 + 1 mod 3 has no roots, order divides p^2 - 1.
    auto r3 = matrix_order_report(MatP::from_rational(fib(), 3), 1000);
    CHECK_FALSE(r3.splits);
    CHECK(8 % r3.order == 0);
    // A Jordan block mod 5 splits without being diagonalizable.
    auto r5 = matrix_order_report(MatP::from_rational(fib(), 5), 1000);
    CHECK(r5.splits);
    CHECK_FALSE(r5.diagonalizable);
    CHECK(r5.order == 10);
    CHECK(r5.divides_p_minus_1_times_p);
    MatP J(2, 7);
    J(0, 0) = J(1, 1) = J(0, 1) = 1;
    CHECK(matrix_order_mod_p(J, 7, 1000) == 7);
    CHECK_THROWS_AS(matrix_order_mod_p(J, 7, 3), BudgetError);
  }

  TEST_CASE("characteristic polynomials and roots") {
    MatP A = MatP::from_rational(fib(), 11);
    auto f = charpoly_mod_p(A);
    CHECK(f == PolyP{1, 8, 1});  // x^2 - 3x + 1
    auto roots = roots_with_multiplicity(f, 11);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == std::pair<u64, int>{5, 1});
    CHECK(roots[1] == std::pair<u64, int>{9, 1});
    auto r5 = roots_with_multiplicity(charpoly_mod_p(MatP::from_rational(fib(), 5)), 5);
    REQUIRE(r5.size() == 1);
    CHECK(r5[0].second == 2);
  }

  TEST_CASE("splitting like characteristic zero") {
    CHECK(splits_like_char0(fib(), 11));
    CHECK(splits_like_char0(fib(), 19));
    CHECK_FALSE(splits_like_char0(fib(), 3));
    CHECK_FALSE(splits_like_char0(fib(), 5));
    CHECK_FALSE(splits_like_char0(fib(), 7));
    CHECK(splits_like_char0(RatMatrix::identity(3), 5));
  }

  TEST_CASE("matrix order laws on every catalog action") {
    for (const char* name : {"z2_fibonacci", "bs12", "heis_x_z2A"}) {
      MGroup G = test::catalog(name);
      for (u64 p : primes_up_to(80)) {
        if (p <= prime_floor(G)) continue;
        for (const auto& a : G.all_actions()) {
          auto rep = matrix_order_report(MatP::from_rational(a, p), p * p * p);
          CHECK(rep.divides_p_minus_1_times_p);
          CHECK(rep.divides_p_minus_1);
        }
      }
    }
  }
}
