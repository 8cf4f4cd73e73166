// Acceptance run: one PASS or FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "rfg/experiments.hpp"
#include "rfg/modp.hpp"
#include "test_util.hpp"

using namespace rfg;
namespace fs = std::filesystem;

namespace {

const char* kCatalog[] = {"bs12", "z2_fibonacci", "heisenberg", "z2_trivial", "heis_x_z2A"};

// Collects failure reasons for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 8) failures.push_back(what);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> radii(const std::vector<CoefficientRow>& rows) {
  std::vector<double> r;
  for (const auto& row : rows) r.push_back(row.r);
  return r;
}

void bch_laws(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  const std::pair<const char*, LieRing> rings[] = {
      {"abelian", LieRing(2, {})}, {"heisenberg", test::heisenberg_ring()}, {"free class 4", test::free_class4_ring()}};
  for (const auto& [name, L] : rings) {
    int bad = 0;
    for (int t = 0; t < 1000; ++t) {
      Vec u = test::random_vec(rng, L.dim(), 4), v = test::random_vec(rng, L.dim(), 4), w = test::random_vec(rng, L.dim(), 4);
      bool ok = L.bch(L.bch(u, v), w) == L.bch(u, L.bch(v, w)) && is_zero(L.bch(u, -u));
      Vec acc = zero_vec(L.dim());
      for (int k = 1; k <= 5 && ok; ++k) {
        acc = L.bch(acc, u);
        ok = L.bch_power(u, k) == acc && L.bch_power(u, -k) == -acc;
      }
      bad += !ok;
    }
    c.expect(bad == 0, std::string(name) + ": " + std::to_string(bad) + " failing triples");
  }
  c.expect(seconds_since(t0) < 10, "runtime above 10 s");
}

int delta_at(const MGroup& G, u64 p) {
  return delta_mod_p(reduce_mod_p(G.lie(), G.all_actions(), p, G.ambient_delta())).delta_p;
}

void delta_values(Check& c) {
  MGroup fib = test::catalog("z2_fibonacci");
  auto split = select_prime(coordinate_form(fib.from_k(test::vec({"1", "0"})), fib), fib, PrimeMode::Paper, 10);
  c.expect(split.size() == 10 && split[0] == 11, "split primes do not start at 11");
  for (u64 p : split) c.expect(delta_at(fib, p) == 1, "fibonacci delta at split prime " + std::to_string(p));
  const RatMatrix& A = fib.description().actions[0];
  for (u64 p : primes_up_to(60))
    if (p > prime_floor(fib) && !splits_like_char0(A, p))
      c.expect(delta_at(fib, p) == 2, "fibonacci delta at non-split prime " + std::to_string(p));
  MGroup H = test::catalog("heisenberg");
  for (u64 p : primes_up_to(31))
    if (p >= 5) c.expect(delta_at(H, p) == 3, "heisenberg delta at " + std::to_string(p));
  MGroup Z = test::catalog("z2_trivial");
  for (u64 p : {3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) c.expect(delta_at(Z, p) == 1, "trivial Z^2 delta at " + std::to_string(p));
}

bool hom_on_generator_pairs(const MGroup& G, const SeparatingQuotient& Q) {
  std::vector<GroupElement> S = G.generators();
  for (const auto& s : G.generators()) S.push_back(G.invert(s));
  const auto& D = *Q.data;
  for (const auto& a : S)
    for (const auto& b : S)
      if (!(evaluate_hom(Q, G.multiply(a, b)) == D.multiply(evaluate_hom(Q, a), evaluate_hom(Q, b)))) return false;
  return true;
}

void separator_soundness(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  for (const char* name : kCatalog) {
    MGroup G = test::catalog(name);
    Separator S(G);
    Ball B = enumerate_ball(G, 5);
    std::vector<SeparatingQuotient> qs;
    try {
      qs = separate_all(S, B);
    } catch (const std::exception& e) {
      c.expect(false, std::string(name) + ": " + e.what());
      continue;
    }
    u64 max_order = 2;
    for (std::size_t i = 1; i < B.elements.size(); ++i) {
      const auto& Q = qs[i];
      max_order = std::max(max_order, Q.order);
      c.expect(!(evaluate_hom(Q, B.elements[i]) == Q.data->identity()), std::string(name) + ": element not separated");
    }
    std::set<const QuotientData*> checked;
    for (std::size_t i = 1; i < B.elements.size(); ++i)
      if (checked.insert(qs[i].data.get()).second)
        c.expect(hom_on_generator_pairs(G, qs[i]), std::string(name) + ": hom property fails on generators");
    if (classify(G) == OracleFamily::Unsupported) continue;
    DivisibilityOracle O(G, static_cast<i64>(max_order));
    auto table = divisibility_all(O, B);
    for (std::size_t i = 1; i < B.elements.size(); ++i)
      c.expect(table.value[i] && static_cast<u64>(*table.value[i]) <= qs[i].order,
               std::string(name) + ": quotient smaller than D(g) at ball index " + std::to_string(i));
  }
  c.expect(seconds_since(t0) < 300, "runtime above 5 min");
}

void divisibility_anchors(Check& c) {
  MGroup bs = test::catalog("bs12");
  DivisibilityOracle O(bs, 200);
  GroupElement x = bs.from_k(test::vec({"1"})), y = bs.identity();
  y.h[0] = 1;
  c.expect(O.divisibility(x).value == 6, "D(x) in BS(1,2)");
  c.expect(O.divisibility(y).value == 2, "D(y) in BS(1,2)");
  c.expect(rf_curve(O, enumerate_ball(bs, 1), {})[0].rf_exact == 6, "RF(1) of BS(1,2)");
  MGroup fib = test::catalog("z2_fibonacci");
  c.expect(divisibility(fib, fib.from_k(test::vec({"1", "0"})), 200).value == 10, "D(e1) in Z^2 x Z");
  MGroup H = test::catalog("heisenberg");
  c.expect(divisibility(H, H.from_k(test::vec({"0", "0", "1"})), 64).value == 8, "D(central generator) in H3");
}

void upper_shape(Check& c) {
  struct Case {
    const char* name;
    GrowthModel model;
    double limit;
  };
  for (const auto& k : {Case{"bs12", GrowthModel::Polynomial, 2.5}, Case{"z2_fibonacci", GrowthModel::Polynomial, 2.5},
                        Case{"heisenberg", GrowthModel::Polylog, 3.5}}) {
    MGroup G = test::catalog(k.name);
    Separator S(G);
    auto rows = upper_bound_curve(S, enumerate_ball(G, 10));
    std::vector<double> r, y;
    for (const auto& row : rows)
      if (row.r >= 1) {
        r.push_back(row.r);
        y.push_back(static_cast<double>(row.rf_upper));
      }
    auto f = fit_exponent(r, y, k.model, G.description().declared_bound);
    std::ostringstream s;
    s << k.name << ": exponent " << f.exponent;
    c.expect(f.exponent <= k.limit, s.str());
  }
}

void lower_witnesses(Check& c) {
  for (const char* name : {"bs12", "z2_fibonacci"}) {
    MGroup G = test::catalog(name);
    DivisibilityOracle O(G, 2000);
    for (const auto& row : witness_curve(O, G.generators()[0], 6)) {
      std::string at = std::string(name) + " r=" + std::to_string(row.r);
      c.expect(row.d_value && *row.d_value >= row.r, at + ": below r");
      if (row.r >= 3)
        c.expect(row.d_value && static_cast<double>(*row.d_value) >= 0.5 * row.r * std::log(row.r), at + ": below r ln r / 2");
    }
  }
  MGroup bs = test::catalog("bs12");
  c.expect(divisibility(bs, bs.from_k(test::vec({"60"})), 200).value == 21, "D(x^60) in BS(1,2)");
}

void ball_geometry(Check& c) {
  MGroup H = test::catalog("heisenberg");
  auto hs = coefficient_stats(H, 12);
  std::vector<double> hy;
  for (const auto& row : hs) hy.push_back(row.max_numerator.get_d());
  auto hf = fit_exponent(radii(hs), hy, GrowthModel::Polynomial);
  c.expect(hf.exponent <= 3, "heisenberg coefficient slope " + std::to_string(hf.exponent));

  MGroup bs = test::catalog("bs12");
  auto bsr = coefficient_stats(bs, 12);
  std::vector<double> by;
  for (const auto& row : bsr) by.push_back(row.max_numerator.get_d());
  auto bf = fit_exponent(radii(bsr), by, GrowthModel::Exponential);
  c.expect(bf.exponent >= 0.25, "bs12 coefficient semilog slope " + std::to_string(bf.exponent));

  auto model = test::heisenberg_matrix_ball_sizes(6);
  for (int r = 0; r <= 6; ++r)
    c.expect(hs[static_cast<std::size_t>(r)].ball_size == model[static_cast<std::size_t>(r)],
             "heisenberg ball size at r=" + std::to_string(r));
}

void prime_selection(Check& c) {
  MGroup bs = test::catalog("bs12");
  Separator S(bs);
  for (const auto& g : enumerate_ball(bs, 8).elements) {
    if (!bs.in_k(g) || bs.is_identity(g)) continue;
    auto cf = coordinate_form(g, bs);
    Integer mx = 0;
    for (const auto& m : cf.mu) mx = std::max(mx, Integer(abs(m)));
    u64 p = S.separate(g).prime;
    c.expect(static_cast<double>(p) <= 8 * std::log(std::max(3.0, mx.get_d())) + 12,
             "prime " + std::to_string(p) + " for mu " + mx.get_str());
  }
  for (const char* name : kCatalog) {
    MGroup G = test::catalog(name);
    for (u64 p : primes_up_to(100)) {
      if (p <= prime_floor(G)) continue;
      for (const auto& a : G.all_actions()) {
        auto rep = matrix_order_report(MatP::from_rational(a, p), p * p * p);
        std::string at = std::string(name) + " p=" + std::to_string(p);
        c.expect(rep.divides_p_minus_1_times_p, at + ": order does not divide (p-1)p");
        if (rep.diagonalizable) c.expect(rep.divides_p_minus_1, at + ": order does not divide p-1");
      }
    }
  }
}

// The experiment suite behind the determinism check.
const std::vector<std::pair<std::string, std::string>> kSuite = {
    {"ball_heisenberg", "ball --group heisenberg --rmax 7"},
    {"coeff_bs12", "coeff-stats --group bs12 --rmax 10"},
    {"upper_fibonacci", "upper-curve --group z2_fibonacci --rmax 7"},
    {"upper_heis_x_z2a", "upper-curve --group heis_x_z2A --rmax 3"},
    {"rf_bs12", "rf-curve --group bs12 --rmax 6 --bound 300"},
    {"rf_heisenberg", "rf-curve --group heisenberg --rmax 6 --bound 128"},
    {"witness_fibonacci", "witness-curve --group z2_fibonacci --element 1,0 --rmax 6 --bound 2000"},
    {"delta_heisenberg", "delta --group heisenberg --primes 6"},
    {"delta_fibonacci", "delta --group z2_fibonacci --primes 10"},
    {"separate_fibonacci", "separate --group z2_fibonacci --element 1,0 --h 0"},
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void determinism(Check& c, const std::string& cli, const fs::path& workdir) {
  if (cli.empty()) {
    c.expect(false, "no CLI path given");
    return;
  }
  for (int threads : {1, 4}) {
    fs::path dir = workdir / ("threads" + std::to_string(threads));
    fs::create_directories(dir);
    for (const auto& [name, args] : kSuite) {
      std::string cmd = cli + " " + args + " --seed 7 --threads " + std::to_string(threads) + " --out " +
                        (dir / (name + ".csv")).string();
      c.expect(std::system(cmd.c_str()) == 0, name + " failed with " + std::to_string(threads) + " threads");
    }
  }
  for (const auto& [name, args] : kSuite) {
    std::string a = slurp(workdir / "threads1" / (name + ".csv")), b = slurp(workdir / "threads4" / (name + ".csv"));
    c.expect(!a.empty() && a == b, name + ".csv differs between thread counts");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string cli;
  std::string workdir = (fs::temp_directory_path() / "rfg_acceptance").string();
  app.add_option("--cli", cli, "Path to rf_cli");
  app.add_option("--workdir", workdir, "Directory for CLI artifacts");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"bch engine group laws", bch_laws},
      {"delta values", delta_values},
      {"separator soundness on B(5)", separator_soundness},
      {"exact divisibility anchors", divisibility_anchors},
      {"upper curve growth shape", upper_shape},
      {"lcm witness lower bounds", lower_witnesses},
      {"ball geometry", ball_geometry},
      {"prime selection and order laws", prime_selection},
      {"determinism across thread counts", [&](Check& c) { determinism(c, cli, workdir); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    bool ok = c.failures.empty();
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
              << std::round(seconds_since(t0) * 10) / 10 << " s)";
    for (const auto& f : c.failures) std::cout << "\n    " << f;
    std::cout << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
