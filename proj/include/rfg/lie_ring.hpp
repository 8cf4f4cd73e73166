#pragma once
// Nilpotent Lie rings given by structure constants, with the truncated BCH group law.

#include <vector>

#include "rfg/rational.hpp"

namespace rfg {

// [v_i, v_j] has coefficient c on v_k; indices are 0-based and i < j.
struct StructureConstant {
  int i = 0, j = 0, k = 0;
  Scalar c;
};

// Bilinear bracket over any field-like scalar type T constructible from long.
template <class T>
struct BracketTable {
  struct Entry {
    int i, j, k;
    T c;
  };
  int dim = 0;
  std::vector<Entry> entries;

  std::vector<T> bracket(const std::vector<T>& v, const std::vector<T>& w) const {
    std::vector<T> out(static_cast<std::size_t>(dim), T(0));
    for (const auto& e : entries) {
      const T& vi = v[static_cast<std::size_t>(e.i)];
      const T& vj = v[static_cast<std::size_t>(e.j)];
      const T& wi = w[static_cast<std::size_t>(e.i)];
      const T& wj = w[static_cast<std::size_t>(e.j)];
      if ((vi == 0 || wj == 0) && (vj == 0 || wi == 0)) continue;
      T coef = vi * wj - vj * wi;
      if (coef == 0) continue;
      out[static_cast<std::size_t>(e.k)] += e.c * coef;
    }
    return out;
  }

  // Truncated BCH series; class must be at most 4.
  std::vector<T> bch(const std::vector<T>& x, const std::vector<T>& y, int nil_class) const {
    std::vector<T> z(x);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += y[i];
    if (nil_class < 2) return z;
    std::vector<T> xy = bracket(x, y);
    add_scaled(z, T(1) / T(2), xy);
    if (nil_class < 3) return z;
    std::vector<T> xxy = bracket(x, xy);
    add_scaled(z, T(1) / T(12), xxy);
    add_scaled(z, T(-1) / T(12), bracket(y, xy));
    if (nil_class < 4) return z;
    add_scaled(z, T(-1) / T(24), bracket(y, xxy));
    return z;
  }

 private:
  static void add_scaled(std::vector<T>& z, const T& t, const std::vector<T>& v) {
    for (std::size_t i = 0; i < z.size(); ++i)
      if (v[i] != 0) z[i] += t * v[i];
  }
};

class LieRing {
 public:
  static constexpr int kMaxBchClass = 4;

  // Validates antisymmetric input shape, Jacobi identity and nilpotency; computes the class.
  LieRing(int dim, std::vector<StructureConstant> constants);

  int dim() const { return dim_; }
  int nilpotency_class() const { return class_; }
  bool is_abelian() const { return table_.entries.empty(); }
  const std::vector<StructureConstant>& structure_constants() const { return constants_; }
  const BracketTable<Scalar>& table() const { return table_; }

  Vec bracket(const Vec& v, const Vec& w) const;
  Vec bch(const Vec& v, const Vec& w) const;
  Vec bch_power(const Vec& v, const Scalar& t) const;
  // Rational-span bases g_1 ⊇ g_2 ⊇ ... ending with the zero space.
  const std::vector<std::vector<Vec>>& lower_central_series() const { return lcs_; }
  // 1, 2 or 6 according to the denominators appearing in the truncated series.
  long bch_radical() const;
  // Exhaustive Jacobi check on basis triples; returns false and fills the witness on failure.
  bool check_jacobi(int* wi = nullptr, int* wj = nullptr, int* wk = nullptr) const;
  bool is_adapted() const;  // c_ij^k = 0 unless k > max(i, j)

 private:
  void check_dim(const Vec& v) const;

  int dim_;
  int class_ = 1;
  std::vector<StructureConstant> constants_;
  BracketTable<Scalar> table_;
  std::vector<std::vector<Vec>> lcs_;
};

Vec bracket(const Vec& v, const Vec& w, const LieRing& L);
Vec bch_multiply(const Vec& v, const Vec& w, const LieRing& L);
Vec bch_power(const Vec& v, const Scalar& t, const LieRing& L);
std::vector<std::vector<Vec>> lower_central_series(const LieRing& L);

}  // namespace rfg
