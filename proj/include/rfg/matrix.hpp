#pragma once
// Dense square matrices and polynomials over Q.

#include <vector>

#include "rfg/rational.hpp"

namespace rfg {

struct RatMatrix {
  int n = 0;
  std::vector<Scalar> a;  // row-major

  RatMatrix() = default;
  explicit RatMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, Scalar(0)) {}
  static RatMatrix identity(int size);

  Scalar& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const Scalar& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

  Vec apply(const Vec& v) const;
  RatMatrix operator*(const RatMatrix& o) const;
  RatMatrix operator-(const RatMatrix& o) const;
  bool operator==(const RatMatrix& o) const { return n == o.n && a == o.a; }
  bool is_identity() const;
  Vec column(int j) const;
};

// Throws PreconditionError when singular.
RatMatrix inverse(const RatMatrix& m);
Scalar determinant(const RatMatrix& m);
RatMatrix matrix_power(const RatMatrix& m, long long e);  // negative uses the inverse

// Polynomials as coefficient vectors, lowest degree first.
using RatPoly = std::vector<Scalar>;
RatPoly characteristic_polynomial(const RatMatrix& m);  // monic
// Degree of f / gcd(f, f'), i.e. the number of distinct roots over an algebraic closure.
int squarefree_degree(const RatPoly& f);

// Row-reduce a list of vectors over Q; returns a basis in reduced row echelon form.
std::vector<Vec> rref_basis(std::vector<Vec> rows);

}  // namespace rfg
