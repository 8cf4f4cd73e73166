#include "rfg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rfg {

DivisibilityTable divisibility_all(const DivisibilityOracle& O, const Ball& B, const ParallelOptions& opt) {
  const long long n = static_cast<long long>(B.elements.size());
  std::vector<std::optional<i64>> value(static_cast<std::size_t>(n));
  std::vector<char> exceeded(static_cast<std::size_t>(n), 0);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  auto body = [&](long long i) {
    const auto& g = B.elements[static_cast<std::size_t>(i)];
    if (O.group().is_identity(g)) return;
    try {
      auto res = O.divisibility(g);
      if (res.value)
        value[static_cast<std::size_t>(i)] = res.value;
      else
        exceeded[static_cast<std::size_t>(i)] = 1;
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  if (opt.parallel) {
#ifdef _OPENMP
    int nthreads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(nthreads)
#endif
    for (long long i = 0; i < n; ++i) body(i);
  } else {
    for (long long i = 0; i < n; ++i) body(i);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  DivisibilityTable t;
  t.value = std::move(value);
  t.exceeded.assign(exceeded.begin(), exceeded.end());
  return t;
}

std::vector<RFRow> rf_curve(const DivisibilityOracle& O, const Ball& B, const std::vector<UpperCurveRow>& upper,
                            const ParallelOptions& opt) {
  auto table = divisibility_all(O, B, opt);
  std::vector<RFRow> rows;
  RFRow cur;
  std::size_t idx = 0;
  for (int r = 0; r <= B.radius; ++r) {
    for (; idx < B.size(r); ++idx) {
      if (table.exceeded[idx]) {
        // RF(r) is only known to exceed the bound from here on.
        if (cur.exact) cur.witness = idx;
        cur.exact = false;
        cur.rf_exact = O.bound() + 1;
      } else if (cur.exact && table.value[idx] && *table.value[idx] > cur.rf_exact) {
        cur.rf_exact = *table.value[idx];
        cur.witness = idx;
      }
    }
    cur.r = r;
    cur.rf_upper = static_cast<std::size_t>(r) < upper.size() ? upper[static_cast<std::size_t>(r)].rf_upper : 0;
    if (r >= 1) rows.push_back(cur);
  }
  return rows;
}

std::vector<WitnessRow> witness_curve(const DivisibilityOracle& O, const GroupElement& g, int r_max) {
  if (r_max < 1) throw PreconditionError("r_max must be at least 1");
  const MGroup& G = O.group();
  if (G.is_identity(g)) throw PreconditionError("witness curve of the identity");
  std::vector<WitnessRow> rows;
  Integer l = 1;
  for (int r = 1; r <= r_max; ++r) {
    l = lcm(l, Integer(r));
    if (!l.fits_slong_p()) throw Error("lcm(1..r) overflows");
    WitnessRow row;
    row.r = r;
    row.lcm = l;
    row.d_value = O.divisibility(G.power(g, l.get_si())).value;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string DeltaRow::order_checks() const {
  std::ostringstream s;
  s << (order_ok ? "pass" : "fail");
  for (u64 o : orders) s << ':' << o;
  return s.str();
}

DeltaTable delta_table(const MGroup& G, PrimeMode mode, int count, const IdealSearchOptions& opt) {
  if (count < 1) throw PreconditionError("prime count must be positive");
  DeltaTable t;
  std::vector<DeltaReport> reports;
  auto actions = G.all_actions();
  for (u64 p = prime_floor(G) + 1; static_cast<int>(t.rows.size()) < count; ++p) {
    if (p > 100000) throw Error("too few admissible primes below 100000");
    if (!prime_is_admissible(G, p, mode)) continue;
    ModPLieRing Lp;
    try {
      Lp = reduce_mod_p(G.lie(), actions, p, G.ambient_delta());
    } catch (const PreconditionError&) {
      continue;  // an action degenerates mod p
    }
    DeltaRow row;
    row.prime = p;
    row.split_ok = std::all_of(G.description().actions.begin(), G.description().actions.end(),
                               [&](const RatMatrix& a) { return splits_like_char0(a, p); });
    for (const auto& a : Lp.actions) {
      auto rep = matrix_order_report(a, p * p * p);
      row.orders.push_back(rep.order);
      if (rep.splits && !rep.divides_p_minus_1_times_p) row.order_ok = false;
      if (rep.diagonalizable && !rep.divides_p_minus_1) row.order_ok = false;
    }
    auto rep = delta_mod_p(Lp, opt);
    row.delta_p = rep.delta_p;
    reports.push_back(std::move(rep));
    t.rows.push_back(std::move(row));
  }
  summarize_delta(reports);
  t.stable_min = reports.front().stable_min;
  t.unstable = reports.front().unstable;
  return t;
}

GrowthModel parse_growth_model(const std::string& s) {
  if (s == "polynomial") return GrowthModel::Polynomial;
  if (s == "polylog") return GrowthModel::Polylog;
  if (s == "exponential") return GrowthModel::Exponential;
  throw SchemaError("unknown growth model '" + s + "'");
}

std::string to_string(GrowthModel m) {
  switch (m) {
    case GrowthModel::Polynomial: return "polynomial";
    case GrowthModel::Polylog: return "polylog";
    default: return "exponential";
  }
}

GrowthFit fit_exponent(const std::vector<double>& r, const std::vector<double>& y, GrowthModel model,
                       const std::optional<DeclaredBound>& declared, double tolerance) {
  if (r.size() != y.size()) throw PreconditionError("fit inputs differ in length");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < 3) continue;
    if (!(y[i] > 0)) throw PreconditionError("fit values must be positive");
    double x = model == GrowthModel::Polynomial ? std::log(r[i])
               : model == GrowthModel::Polylog  ? std::log(std::log(r[i]))
                                                : r[i];
    xs.push_back(x);
    ys.push_back(std::log(y[i]));
  }
  if (xs.size() < 4) throw PreconditionError("fit needs at least four points with r >= 3");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  GrowthFit f;
  f.model = model;
  f.points = xs.size();
  double den = n * sxx - sx * sx;
  f.exponent = den == 0 ? 0 : (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.exponent * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (f.intercept + f.exponent * xs[i]);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / n);
  if (declared && declared->model == to_string(model))
    f.verdict = f.exponent <= declared->exponent + tolerance ? "consistent" : "violates-upper";
  return f;
}

}  // namespace rfg
