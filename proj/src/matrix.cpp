#include "rfg/matrix.hpp"

#include <utility>

namespace rfg {

RatMatrix RatMatrix::identity(int size) {
  RatMatrix m(size);
  for (int i = 0; i < size; ++i) m(i, i) = 1;
  return m;
}

Vec RatMatrix::apply(const Vec& v) const {
  Vec out = zero_vec(n);
  for (int j = 0; j < n; ++j) {
    if (v[static_cast<std::size_t>(j)] == 0) continue;
    for (int i = 0; i < n; ++i)
      if ((*this)(i, j) != 0) out[static_cast<std::size_t>(i)] += (*this)(i, j) * v[static_cast<std::size_t>(j)];
  }
  return out;
}

RatMatrix RatMatrix::operator*(const RatMatrix& o) const {
  RatMatrix r(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if ((*this)(i, k) == 0) continue;
      for (int j = 0; j < n; ++j)
        if (o(k, j) != 0) r(i, j) += (*this)(i, k) * o(k, j);
    }
  return r;
}

RatMatrix RatMatrix::operator-(const RatMatrix& o) const {
  RatMatrix r(*this);
  for (std::size_t i = 0; i < a.size(); ++i) r.a[i] -= o.a[i];
  return r;
}

bool RatMatrix::is_identity() const { return *this == identity(n); }

Vec RatMatrix::column(int j) const {
  Vec c = zero_vec(n);
  for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = (*this)(i, j);
  return c;
}

RatMatrix inverse(const RatMatrix& m) {
  int n = m.n;
  RatMatrix a(m), inv = RatMatrix::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (a(r, col) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw PreconditionError("singular matrix");
    for (int j = 0; j < n; ++j) {
      std::swap(a(col, j), a(piv, j));
      std::swap(inv(col, j), inv(piv, j));
    }
    Scalar s = 1 / a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) *= s;
      inv(col, j) *= s;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || a(r, col) == 0) continue;
      Scalar f = a(r, col);
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

Scalar determinant(const RatMatrix& m) {
  int n = m.n;
  RatMatrix a(m);
  Scalar det = 1;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (a(r, col) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return 0;
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      det = -det;
    }
    det *= a(col, col);
    for (int r = col + 1; r < n; ++r) {
      if (a(r, col) == 0) continue;
      Scalar f = a(r, col) / a(col, col);
      for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
    }
  }
  return det;
}

RatMatrix matrix_power(const RatMatrix& m, long long e) {
  RatMatrix base = e < 0 ? inverse(m) : m;
  unsigned long long k = e < 0 ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
  RatMatrix r = RatMatrix::identity(m.n);
  while (k) {
    if (k & 1) r = r * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return r;
}

RatPoly characteristic_polynomial(const RatMatrix& m) {
  // Faddeev-LeVerrier.
  int n = m.n;
  RatPoly c(static_cast<std::size_t>(n) + 1, Scalar(0));
  c[static_cast<std::size_t>(n)] = 1;
  RatMatrix mk(n);
  for (int k = 1; k <= n; ++k) {
    RatMatrix t = m * mk;
    for (int i = 0; i < n; ++i) t(i, i) += c[static_cast<std::size_t>(n - k + 1)];
    mk = t;
    RatMatrix am = m * mk;
    Scalar tr = 0;
    for (int i = 0; i < n; ++i) tr += am(i, i);
    c[static_cast<std::size_t>(n - k)] = -tr / k;
  }
  return c;
}

namespace {

void trim(RatPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

RatPoly poly_mod(RatPoly a, const RatPoly& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    Scalar f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
    trim(a);
  }
  return a;
}

}  // namespace

int squarefree_degree(const RatPoly& f0) {
  RatPoly f = f0;
  trim(f);
  if (f.size() <= 1) return 0;
  RatPoly df;
  for (std::size_t i = 1; i < f.size(); ++i) df.push_back(f[i] * static_cast<long>(i));
  trim(df);
  RatPoly a = f, b = df;
  while (!b.empty()) {
    RatPoly r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  int gdeg = static_cast<int>(a.size()) - 1;
  return static_cast<int>(f.size()) - 1 - gdeg;
}

std::vector<Vec> rref_basis(std::vector<Vec> rows) {
  std::vector<Vec> out;
  if (rows.empty()) return out;
  int ncols = static_cast<int>(rows[0].size());
  std::size_t rank = 0;
  for (int col = 0; col < ncols && rank < rows.size(); ++col) {
    std::size_t piv = rows.size();
    for (std::size_t r = rank; r < rows.size(); ++r)
      if (rows[r][static_cast<std::size_t>(col)] != 0) {
        piv = r;
        break;
      }
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    Scalar s = 1 / rows[rank][static_cast<std::size_t>(col)];
    for (auto& x : rows[rank]) x *= s;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank) continue;
      Scalar f = rows[r][static_cast<std::size_t>(col)];
      if (f != 0) axpy(rows[r], -f, rows[rank]);
    }
    ++rank;
  }
  rows.resize(rank);
  return rows;
}

}  // namespace rfg
