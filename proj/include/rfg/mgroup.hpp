#pragma once
// Split M-groups K ⋊ (Z^n × F) in BCH coordinates: arithmetic, validation and word balls.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rfg/lie_ring.hpp"
#include "rfg/matrix.hpp"
#include "rfg/numtheory.hpp"

namespace rfg {

// Finite group F given by its multiplication table (element 0 is the identity) and one
// Lie-ring automorphism per element.
struct FinitePart {
  int order = 1;
  std::vector<std::vector<int>> table;
  std::vector<RatMatrix> actions;
};

struct GroupElement {
  Vec k;                  // BCH coordinates of the K-part
  std::vector<i64> h;     // exponents of h_1..h_n
  int f = 0;              // index into F

  bool operator==(const GroupElement& o) const { return f == o.f && h == o.h && k == o.k; }
};

std::size_t hash_element(const GroupElement& g);
struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const { return hash_element(g); }
};

struct DeclaredBound {
  std::string model;  // polynomial | polylog | exponential
  double exponent = 0;
};

struct MGroupDescription {
  std::string name;
  int dim_k = 1;
  int rank_h = 0;
  Integer delta = 1;
  int nilpotency_class = 1;
  std::vector<StructureConstant> structure_constants;
  std::vector<RatMatrix> actions;
  std::optional<FinitePart> finite_part;
  std::optional<std::vector<GroupElement>> generators;  // empty optional: standard generators
  std::vector<std::vector<int>> relators;                // words in ±(1-based generator index)
  std::optional<DeclaredBound> declared_bound;
};

struct ValidationReport {
  bool ok = true;
  std::string message;
};

ValidationReport validate(const MGroupDescription& d);

struct ValidationFailure : Error {
  using Error::Error;
};

class MGroup {
 public:
  static constexpr int kActionCache = 64;

  // Throws ValidationFailure with the first violated identity.
  explicit MGroup(MGroupDescription d);

  const MGroupDescription& description() const { return desc_; }
  const std::string& name() const { return desc_.name; }
  const LieRing& lie() const { return lie_; }
  int dim() const { return desc_.dim_k; }
  int rank() const { return desc_.rank_h; }
  int finite_order() const { return desc_.finite_part ? desc_.finite_part->order : 1; }
  // Δ' = lcm(Δ, BCH denominators).
  const Integer& ambient_delta() const { return ambient_delta_; }
  const std::vector<GroupElement>& generators() const { return generators_; }
  // All action matrices: the ξ_j followed by the non-identity η_s.
  std::vector<RatMatrix> all_actions() const;

  GroupElement identity() const;
  bool is_identity(const GroupElement& g) const;
  bool in_k(const GroupElement& g) const;
  GroupElement from_k(const Vec& v) const;
  void check_conforms(const GroupElement& g) const;

  GroupElement multiply(const GroupElement& g, const GroupElement& h) const;
  GroupElement invert(const GroupElement& g) const;
  GroupElement power(const GroupElement& g, i64 t) const;
  GroupElement evaluate_word(const std::vector<int>& word) const;
  // Applies Ξ(a) η(f) to a K-vector.
  Vec act(const std::vector<i64>& a, int f, const Vec& v) const;
  int finite_mul(int a, int b) const;
  int finite_inv(int a) const;

 private:
  struct Unchecked {};
  MGroup(MGroupDescription d, Unchecked);
  friend ValidationReport validate(const MGroupDescription& d);
  const RatMatrix& xi_power(int j, i64 e, RatMatrix& scratch) const;

  MGroupDescription desc_;
  LieRing lie_;
  Integer ambient_delta_;
  std::vector<GroupElement> generators_;
  std::vector<std::vector<RatMatrix>> xi_pow_;  // [j][e + kActionCache]
  std::vector<int> finite_inverse_;
};

GroupElement multiply(const GroupElement& g, const GroupElement& h, const MGroup& G);
GroupElement invert(const GroupElement& g, const MGroup& G);
GroupElement power(const GroupElement& g, i64 t, const MGroup& G);

// Common-denominator form of a K-element: k = Σ (μ_i / Δ'^j) v_i with j minimal.
struct CoordinateForm {
  std::vector<Integer> mu;
  unsigned j = 0;
  Integer gcd;  // gcd of the μ_i
};

CoordinateForm coordinate_form(const GroupElement& g, const MGroup& G);
CoordinateForm coordinate_form_of(const Vec& k, const Integer& delta);  // no nontriviality check

struct BallOptions {
  std::size_t budget = 5'000'000;
  int threads = 0;       // 0 keeps the OpenMP default
  bool parallel = true;  // false selects the serial reference
};

// Elements in BFS order with their word norms; layer_end[r] counts elements of norm ≤ r.
struct Ball {
  int radius = 0;
  std::vector<GroupElement> elements;
  std::vector<int> norm;
  std::vector<std::size_t> layer_end;

  std::size_t size(int r) const { return layer_end[static_cast<std::size_t>(r)]; }
};

Ball enumerate_ball(const MGroup& G, int r, const BallOptions& opt = {});

struct BallReport {
  int radius = 0;
  std::vector<GroupElement> elements;
  std::size_t size = 0;
  Integer max_numerator = 0;  // over B(r) ∩ K
  unsigned max_delta_exponent = 0;
};

BallReport ball(const MGroup& G, int r, const BallOptions& opt = {});

struct CoefficientRow {
  int r = 0;
  std::size_t ball_size = 0;
  std::size_t k_size = 0;  // |B(r) ∩ K|
  Integer max_numerator = 0;
  unsigned max_delta_exponent = 0;
};

std::vector<CoefficientRow> coefficient_stats(const MGroup& G, int r_max, const BallOptions& opt = {});
std::vector<CoefficientRow> coefficient_stats(const MGroup& G, const Ball& B);

// g^{lcm(1..r)} for nontrivial g in K.
GroupElement lcm_witness(const MGroup& G, const GroupElement& g, int r);

}  // namespace rfg
