#include "rfg/lie_ring.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>

#include "rfg/matrix.hpp"

namespace rfg {

LieRing::LieRing(int dim, std::vector<StructureConstant> constants) : dim_(dim) {
  if (dim < 1) throw SchemaError("Lie ring dimension must be positive");
  std::map<std::tuple<int, int, int>, Scalar> merged;
  for (const auto& sc : constants) {
    if (sc.i < 0 || sc.j < 0 || sc.k < 0 || sc.i >= dim || sc.j >= dim || sc.k >= dim)
      throw SchemaError("structure constant index out of range");
    if (sc.i >= sc.j) throw SchemaError("structure constants must be given with i < j");
    merged[{sc.i, sc.j, sc.k}] += sc.c;
  }
  table_.dim = dim;
  for (const auto& [key, c] : merged) {
    if (c == 0) continue;
    auto [i, j, k] = key;
    constants_.push_back({i, j, k, c});
    table_.entries.push_back({i, j, k, c});
  }
  int a = 0, b = 0, c = 0;
  if (!check_jacobi(&a, &b, &c))
    throw SchemaError("Jacobi identity fails on basis triple (" + std::to_string(a + 1) + "," +
                      std::to_string(b + 1) + "," + std::to_string(c + 1) + ")");

  std::vector<Vec> current;
  for (int i = 0; i < dim; ++i) current.push_back(unit_vec(dim, i));
  lcs_.push_back(current);
  while (!current.empty()) {
    std::vector<Vec> next;
    for (const auto& x : current)
      for (int j = 0; j < dim; ++j) next.push_back(bracket(x, unit_vec(dim, j)));
    next = rref_basis(std::move(next));
    if (next.size() == current.size()) throw SchemaError("Lie ring is not nilpotent");
    lcs_.push_back(next);
    current = std::move(next);
  }
  class_ = std::max(1, static_cast<int>(lcs_.size()) - 1);
}

void LieRing::check_dim(const Vec& v) const {
  if (static_cast<int>(v.size()) != dim_) throw PreconditionError("vector dimension mismatch");
}

Vec LieRing::bracket(const Vec& v, const Vec& w) const {
  check_dim(v);
  check_dim(w);
  return table_.bracket(v, w);
}

Vec LieRing::bch(const Vec& v, const Vec& w) const {
  check_dim(v);
  check_dim(w);
  if (class_ > kMaxBchClass)
    throw UnsupportedError("BCH product supports nilpotency class <= 4, got " + std::to_string(class_));
  return table_.bch(v, w, class_);
}

Vec LieRing::bch_power(const Vec& v, const Scalar& t) const {
  check_dim(v);
  return scale(v, t);
}

long LieRing::bch_radical() const {
  if (class_ <= 1) return 1;
  if (class_ == 2) return 2;
  return 6;
}

bool LieRing::check_jacobi(int* wi, int* wj, int* wk) const {
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      for (int k = j + 1; k < dim_; ++k) {
        Vec a = unit_vec(dim_, i), b = unit_vec(dim_, j), c = unit_vec(dim_, k);
        Vec s = table_.bracket(a, table_.bracket(b, c)) + table_.bracket(b, table_.bracket(c, a)) +
                table_.bracket(c, table_.bracket(a, b));
        if (!is_zero(s)) {
          if (wi) *wi = i;
          if (wj) *wj = j;
          if (wk) *wk = k;
          return false;
        }
      }
  return true;
}

bool LieRing::is_adapted() const {
  return std::all_of(constants_.begin(), constants_.end(),
                     [](const StructureConstant& s) { return s.k > s.j; });
}

Vec bracket(const Vec& v, const Vec& w, const LieRing& L) { return L.bracket(v, w); }
Vec bch_multiply(const Vec& v, const Vec& w, const LieRing& L) { return L.bch(v, w); }
Vec bch_power(const Vec& v, const Scalar& t, const LieRing& L) { return L.bch_power(v, t); }
std::vector<std::vector<Vec>> lower_central_series(const LieRing& L) { return L.lower_central_series(); }

}  // namespace rfg
