#pragma once
// Linear algebra over Z/p, mod-p Lie rings, invariant ideals and the delta invariant.

#include <cstdint>
#include <utility>
#include <vector>

#include "rfg/lie_ring.hpp"
#include "rfg/matrix.hpp"
#include "rfg/numtheory.hpp"

namespace rfg {

using VecP = std::vector<std::uint32_t>;

u64 reduce_rational(const Scalar& x, u64 p);  // throws if p divides the denominator

struct MatP {
  int n = 0;
  u64 p = 2;
  std::vector<std::uint32_t> a;

  MatP() = default;
  MatP(int size, u64 prime) : n(size), p(prime), a(static_cast<std::size_t>(size) * size, 0) {}
  static MatP identity(int size, u64 prime);
  static MatP from_rational(const RatMatrix& m, u64 prime);

  std::uint32_t& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  std::uint32_t operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  VecP apply(const VecP& v) const;
  MatP operator*(const MatP& o) const;
  bool operator==(const MatP& o) const { return n == o.n && a == o.a; }
  bool is_identity() const { return *this == identity(n, p); }
};

MatP inverse_mod_p(const MatP& m);  // throws PreconditionError if singular
MatP power_mod_p(const MatP& m, u64 e);

// Reduced row echelon basis with unit pivots; rows sorted by pivot column.
std::vector<VecP> rref_mod_p(std::vector<VecP> rows, u64 p);
// Reduces v against an RREF basis; the result is zero iff v lies in the span.
VecP reduce_against(const std::vector<VecP>& rref, VecP v, u64 p);
std::vector<int> pivot_columns(const std::vector<VecP>& rref);
// Basis of the intersection of two subspaces given by RREF bases, in RREF.
std::vector<VecP> intersect_mod_p(const std::vector<VecP>& a, const std::vector<VecP>& b, int dim, u64 p);

struct ModPLieRing {
  u64 prime = 0;
  int dim = 0;
  int nil_class = 1;
  std::vector<std::uint32_t> sc;  // dense c[(i*dim+j)*dim+k], antisymmetric
  std::vector<MatP> actions;      // every declared action, including finite-part ones

  VecP bracket(const VecP& v, const VecP& w) const;
  VecP bch(const VecP& v, const VecP& w) const;
};

// Preconditions: p > delta, p > dim, p > class, p does not divide delta.
ModPLieRing reduce_mod_p(const LieRing& L, const std::vector<RatMatrix>& actions, u64 p, const Integer& delta);
VecP reduce_vec_mod_p(const Vec& v, u64 p);

struct IdealModP {
  std::vector<VecP> basis;  // RREF
  int codim = 0;

  bool contains(const VecP& v, u64 p) const;
  bool operator==(const IdealModP& o) const { return basis == o.basis; }
  bool operator<(const IdealModP& o) const { return basis < o.basis; }
};

bool is_invariant_ideal(const ModPLieRing& Lp, const std::vector<VecP>& rref);

struct IdealSearchOptions {
  u64 budget = 20'000'000;  // projective points or subspaces examined
  int threads = 0;          // 0 keeps the OpenMP default
};

// Join-closure of cyclic invariant ideals, parallel over projective points.
std::vector<IdealModP> invariant_ideals_mod_p(const ModPLieRing& Lp, const IdealSearchOptions& opt = {});
// Serial reference: tests every subspace in reduced row echelon form.
std::vector<IdealModP> invariant_ideals_exhaustive(const ModPLieRing& Lp, u64 budget = 20'000'000);

struct DeltaReport {
  u64 prime = 0;
  int delta_p = 0;
  std::vector<IdealModP> witness_family;
  int stable_min = 0;
  bool unstable = false;
};

DeltaReport delta_mod_p(const ModPLieRing& Lp, const std::vector<IdealModP>& ideals);
DeltaReport delta_mod_p(const ModPLieRing& Lp, const IdealSearchOptions& opt = {});
// Fills stable_min and the unstable flag across a sample of primes.
void summarize_delta(std::vector<DeltaReport>& reports);

// Polynomials over Z/p, lowest degree first.
using PolyP = std::vector<u64>;
PolyP charpoly_mod_p(const MatP& m);
std::vector<std::pair<u64, int>> roots_with_multiplicity(PolyP f, u64 p);

struct MatrixOrderReport {
  u64 order = 0;
  bool splits = false;
  bool diagonalizable = false;
  bool divides_p_minus_1_times_p = true;  // checked only when the polynomial splits
  bool divides_p_minus_1 = true;          // checked only when diagonalizable
};

MatrixOrderReport matrix_order_report(const MatP& m, u64 budget);
// Least e >= 1 with m^e = I; throws BudgetError past the budget and VerificationError if a
// divisibility law fails.
u64 matrix_order_mod_p(const MatP& m, u64 p, u64 budget);

// Split test used for prime selection: the characteristic polynomial splits mod p and has as
// many distinct roots as over an algebraic closure of Q.
bool splits_like_char0(const RatMatrix& m, u64 p);

}  // namespace rfg
