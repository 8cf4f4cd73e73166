#pragma once
// Experiment drivers: exact and certified RF curves, lcm witnesses, δ tables and growth fits.

#include <optional>
#include <string>
#include <vector>

#include "rfg/oracle.hpp"
#include "rfg/separator.hpp"

namespace rfg {

struct ParallelOptions {
  int threads = 0;
  bool parallel = true;
};

// D(g) for every element of the ball in ball order; nullopt for the identity or when D exceeds
// the oracle bound.
struct DivisibilityTable {
  std::vector<std::optional<i64>> value;
  std::vector<bool> exceeded;
};
DivisibilityTable divisibility_all(const DivisibilityOracle& O, const Ball& B, const ParallelOptions& opt = {});

struct RFRow {
  int r = 0;
  i64 rf_exact = 0;  // bound + 1 when some D exceeded the bound
  bool exact = true;
  u64 rf_upper = 0;  // 0 when no separator curve was supplied
  std::size_t witness = 0;

  std::string bound_status() const { return exact ? "exact" : "lower_bound"; }
};

// Rows for r = 1..radius. `upper` is indexed by radius as returned by upper_bound_curve.
std::vector<RFRow> rf_curve(const DivisibilityOracle& O, const Ball& B, const std::vector<UpperCurveRow>& upper,
                            const ParallelOptions& opt = {});

struct WitnessRow {
  int r = 0;
  Integer lcm;
  std::optional<i64> d_value;
  std::string bound_status() const { return d_value ? "exact" : "lower_bound"; }
};

std::vector<WitnessRow> witness_curve(const DivisibilityOracle& O, const GroupElement& g, int r_max);

struct DeltaRow {
  u64 prime = 0;
  int delta_p = 0;
  bool split_ok = false;
  std::vector<u64> orders;  // one per action
  bool order_ok = true;     // every applicable divisibility law held
  std::string order_checks() const;
};

struct DeltaTable {
  std::vector<DeltaRow> rows;
  int stable_min = 0;
  bool unstable = false;
};

// δ_p at the first `count` admissible primes of the given mode.
DeltaTable delta_table(const MGroup& G, PrimeMode mode, int count, const IdealSearchOptions& opt = {});

enum class GrowthModel { Polynomial, Polylog, Exponential };
GrowthModel parse_growth_model(const std::string& s);
std::string to_string(GrowthModel m);

struct GrowthFit {
  GrowthModel model = GrowthModel::Polynomial;
  double exponent = 0;
  double intercept = 0;
  double residual = 0;  // RMS in the transformed domain
  std::size_t points = 0;
  std::string verdict = "inconclusive";
};

// Least squares of ln y against ln r, ln ln r or r, using r >= 3 only. Needs four points.
// The verdict compares against the declared bound with an additive exponent tolerance.
GrowthFit fit_exponent(const std::vector<double>& r, const std::vector<double>& y, GrowthModel model,
                       const std::optional<DeclaredBound>& declared = std::nullopt, double tolerance = 0.5);

}  // namespace rfg
