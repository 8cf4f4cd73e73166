#pragma once
// Constructive separating quotients Q = (L_p/J) ⋊ ((Z_e)^n × F) with runtime verification.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfg/mgroup.hpp"
#include "rfg/modp.hpp"

namespace rfg {

enum class PrimeMode { Paper, BestEffort };
PrimeMode parse_prime_mode(const std::string& s);
std::string to_string(PrimeMode m);

// Primes must exceed this: max(Δ', m, c, 2·max|structure constant numerator|).
u64 prime_floor(const MGroup& G);
// Every condition of prime selection except the divisibility filter on μ.
bool prime_is_admissible(const MGroup& G, u64 p, PrimeMode mode);
// The first `count` admissible primes not dividing gcd(μ); throws Error above the ceiling.
std::vector<u64> select_prime(const CoordinateForm& cf, const MGroup& G, PrimeMode mode, int count,
                              u64 ceiling = 100000);

struct QElement {
  VecP x;               // coordinates in L_p/J
  std::vector<u64> a;   // exponents mod e
  int f = 0;
  bool operator==(const QElement& o) const { return f == o.f && a == o.a && x == o.x; }
};

// Arithmetic of the finite quotient; shared by every certificate built on it.
struct QuotientData {
  u64 prime = 0;  // 0 for a quotient onto Z^n mod e and/or F only
  int dim = 0;    // dimension of L
  std::vector<VecP> ideal;
  std::vector<int> free_cols;
  u64 exponent = 1;
  int rank = 0;
  bool with_finite = false;
  std::shared_ptr<const ModPLieRing> Lp;
  std::vector<MatP> induced;                 // one per ξ_j, on L_p/J
  std::vector<std::vector<MatP>> induced_pow;  // [j][t] for 0 <= t < e
  std::vector<MatP> induced_finite;          // per F element
  std::vector<std::vector<int>> finite_table;

  VecP project(const VecP& v) const;
  VecP lift(const VecP& x) const;
  QElement identity() const;
  QElement multiply(const QElement& u, const QElement& v) const;
  QElement power(const QElement& u, u64 t) const;
};

struct SeparatingQuotient {
  u64 prime = 0;
  IdealModP ideal;
  int codim = 0;
  u64 exponent = 1;
  int finite_part_order = 1;
  u64 order = 1;
  int delta_p = 0;
  std::vector<MatP> induced_actions;
  std::vector<std::string> checks_passed;
  std::shared_ptr<const QuotientData> data;
};

QElement evaluate_hom(const SeparatingQuotient& Q, const GroupElement& g);
nlohmann::json certificate_json(const SeparatingQuotient& Q);

struct SeparatorOptions {
  PrimeMode mode = PrimeMode::Paper;
  int prime_count = 1;
  u64 prime_ceiling = 100000;
  IdealSearchOptions ideal_options;
};

class Separator {
 public:
  Separator(const MGroup& G, SeparatorOptions opt = {});

  const MGroup& group() const { return G_; }
  const SeparatorOptions& options() const { return opt_; }
  // Throws VerificationError if any runtime check fails.
  SeparatingQuotient separate(const GroupElement& g) const;

  struct PrimeData {
    std::shared_ptr<const ModPLieRing> Lp;
    std::vector<IdealModP> ideals;
    DeltaReport delta;
  };
  const PrimeData& prime_data(u64 p) const;

 private:
  SeparatingQuotient separate_in_k(const GroupElement& g) const;
  SeparatingQuotient separate_top(const GroupElement& g) const;
  SeparatingQuotient build_k_quotient(u64 p, const IdealModP& J, int delta_p) const;
  // Element-independent checks, run once per distinct quotient.
  void verify_quotient(SeparatingQuotient& Q) const;
  SeparatingQuotient cached(const std::string& key, const std::function<SeparatingQuotient()>& make) const;

  const MGroup& G_;
  SeparatorOptions opt_;
  mutable std::mutex mu_;
  mutable std::map<u64, std::unique_ptr<PrimeData>> cache_;
  mutable std::mutex qmu_;
  mutable std::map<std::string, SeparatingQuotient> qcache_;
};

SeparatingQuotient separate(const GroupElement& g, const MGroup& G, PrimeMode mode);

struct UpperCurveRow {
  int r = 0;
  u64 rf_upper = 0;
  std::size_t witness = 0;  // index into the ball
  u64 prime = 0;
  int codim = 0;
  u64 exponent = 1;
};

struct UpperCurveOptions {
  int threads = 0;
  bool parallel = true;
};

// Row r holds the largest certified |Q| over nontrivial g in B(r) (first in BFS order on ties).
std::vector<UpperCurveRow> upper_bound_curve(const Separator& S, const Ball& B, const UpperCurveOptions& opt = {});
// Per-element orders in ball order (0 for the identity).
std::vector<SeparatingQuotient> separate_all(const Separator& S, const Ball& B, const UpperCurveOptions& opt = {});

}  // namespace rfg
