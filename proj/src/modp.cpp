#include "rfg/modp.hpp"

#include <algorithm>
#include <set>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rfg {

u64 reduce_rational(const Scalar& x, u64 p) {
  Integer pp(static_cast<unsigned long>(p));
  Integer num = x.get_num() % pp;
  if (num < 0) num += pp;
  Integer den = x.get_den() % pp;
  if (den == 0) throw PreconditionError("denominator divisible by p=" + std::to_string(p));
  return num.get_ui() * mod_inv(den.get_ui(), p) % p;
}

MatP MatP::identity(int size, u64 prime) {
  MatP m(size, prime);
  for (int i = 0; i < size; ++i) m(i, i) = 1;
  return m;
}

MatP MatP::from_rational(const RatMatrix& m, u64 prime) {
  MatP r(m.n, prime);
  for (std::size_t i = 0; i < m.a.size(); ++i) r.a[i] = static_cast<std::uint32_t>(reduce_rational(m.a[i], prime));
  return r;
}

VecP MatP::apply(const VecP& v) const {
  VecP out(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    u64 s = 0;
    for (int j = 0; j < n; ++j) s += static_cast<u64>((*this)(i, j)) * v[static_cast<std::size_t>(j)] % p;
    out[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(s % p);
  }
  return out;
}

MatP MatP::operator*(const MatP& o) const {
  MatP r(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      u64 s = 0;
      for (int k = 0; k < n; ++k) s += static_cast<u64>((*this)(i, k)) * o(k, j) % p;
      r(i, j) = static_cast<std::uint32_t>(s % p);
    }
  return r;
}

MatP inverse_mod_p(const MatP& m) {
  int n = m.n;
  u64 p = m.p;
  MatP a(m), inv = MatP::identity(n, p);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (a(r, col)) {
        piv = r;
        break;
      }
    if (piv < 0) throw PreconditionError("matrix singular modulo " + std::to_string(p));
    for (int j = 0; j < n; ++j) {
      std::swap(a(col, j), a(piv, j));
      std::swap(inv(col, j), inv(piv, j));
    }
    u64 s = mod_inv(a(col, col), p);
    for (int j = 0; j < n; ++j) {
      a(col, j) = static_cast<std::uint32_t>(a(col, j) * s % p);
      inv(col, j) = static_cast<std::uint32_t>(inv(col, j) * s % p);
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || !a(r, col)) continue;
      u64 f = p - a(r, col);
      for (int j = 0; j < n; ++j) {
        a(r, j) = static_cast<std::uint32_t>((a(r, j) + f * a(col, j)) % p);
        inv(r, j) = static_cast<std::uint32_t>((inv(r, j) + f * inv(col, j)) % p);
      }
    }
  }
  return inv;
}

MatP power_mod_p(const MatP& m, u64 e) {
  MatP r = MatP::identity(m.n, m.p), b = m;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

namespace {

int leading_index(const VecP& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i]) return static_cast<int>(i);
  return -1;
}

// Inserts an already reduced nonzero vector into an RREF basis.
void insert_reduced(std::vector<VecP>& rref, VecP v, u64 p) {
  int c = leading_index(v);
  u64 s = mod_inv(v[static_cast<std::size_t>(c)], p);
  for (auto& x : v) x = static_cast<std::uint32_t>(x * s % p);
  for (auto& row : rref) {
    u64 f = row[static_cast<std::size_t>(c)];
    if (!f) continue;
    for (std::size_t i = 0; i < row.size(); ++i)
      row[i] = static_cast<std::uint32_t>((row[i] + (p - f) * v[i]) % p);
  }
  auto pos = std::find_if(rref.begin(), rref.end(), [&](const VecP& r) { return leading_index(r) > c; });
  rref.insert(pos, std::move(v));
}

}  // namespace

VecP reduce_against(const std::vector<VecP>& rref, VecP v, u64 p) {
  for (const auto& row : rref) {
    int c = leading_index(row);
    u64 f = v[static_cast<std::size_t>(c)];
    if (!f) continue;
    for (std::size_t i = static_cast<std::size_t>(c); i < v.size(); ++i)
      v[i] = static_cast<std::uint32_t>((v[i] + (p - f) * row[i]) % p);
  }
  return v;
}

std::vector<VecP> rref_mod_p(std::vector<VecP> rows, u64 p) {
  std::vector<VecP> out;
  for (auto& r : rows) {
    VecP v = reduce_against(out, std::move(r), p);
    if (leading_index(v) >= 0) insert_reduced(out, std::move(v), p);
  }
  return out;
}

std::vector<int> pivot_columns(const std::vector<VecP>& rref) {
  std::vector<int> out;
  for (const auto& r : rref) out.push_back(leading_index(r));
  return out;
}

namespace {

std::vector<VecP> annihilator(const std::vector<VecP>& rref, int dim, u64 p) {
  std::vector<int> piv = pivot_columns(rref);
  std::vector<VecP> out;
  for (int f = 0; f < dim; ++f) {
    if (std::find(piv.begin(), piv.end(), f) != piv.end()) continue;
    VecP x(static_cast<std::size_t>(dim), 0);
    x[static_cast<std::size_t>(f)] = 1;
    for (std::size_t r = 0; r < rref.size(); ++r)
      x[static_cast<std::size_t>(piv[r])] = static_cast<std::uint32_t>((p - rref[r][static_cast<std::size_t>(f)]) % p);
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

std::vector<VecP> intersect_mod_p(const std::vector<VecP>& a, const std::vector<VecP>& b, int dim, u64 p) {
  std::vector<VecP> ann = annihilator(a, dim, p);
  for (auto& v : annihilator(b, dim, p)) ann.push_back(std::move(v));
  return rref_mod_p(annihilator(rref_mod_p(std::move(ann), p), dim, p), p);
}

VecP ModPLieRing::bracket(const VecP& v, const VecP& w) const {
  std::vector<u64> acc(static_cast<std::size_t>(dim), 0);
  for (int i = 0; i < dim; ++i) {
    if (!v[static_cast<std::size_t>(i)]) continue;
    for (int j = 0; j < dim; ++j) {
      if (!w[static_cast<std::size_t>(j)] || i == j) continue;
      u64 vw = static_cast<u64>(v[static_cast<std::size_t>(i)]) * w[static_cast<std::size_t>(j)] % prime;
      const std::uint32_t* c = &sc[(static_cast<std::size_t>(i) * dim + j) * dim];
      for (int k = 0; k < dim; ++k)
        if (c[k]) acc[static_cast<std::size_t>(k)] = (acc[static_cast<std::size_t>(k)] + vw * c[k]) % prime;
    }
  }
  return VecP(acc.begin(), acc.end());
}

VecP ModPLieRing::bch(const VecP& x, const VecP& y) const {
  auto add = [&](VecP& z, u64 t, const VecP& v) {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = static_cast<std::uint32_t>((z[i] + t * v[i]) % prime);
  };
  VecP z(x);
  add(z, 1, y);
  if (nil_class < 2) return z;
  VecP xy = bracket(x, y);
  add(z, mod_inv(2, prime), xy);
  if (nil_class < 3) return z;
  u64 i12 = mod_inv(12, prime);
  VecP xxy = bracket(x, xy);
  add(z, i12, xxy);
  add(z, prime - i12, bracket(y, xy));
  if (nil_class < 4) return z;
  add(z, prime - mod_inv(24, prime), bracket(y, xxy));
  return z;
}

VecP reduce_vec_mod_p(const Vec& v, u64 p) {
  VecP out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<std::uint32_t>(reduce_rational(v[i], p));
  return out;
}

ModPLieRing reduce_mod_p(const LieRing& L, const std::vector<RatMatrix>& actions, u64 p, const Integer& delta) {
  std::string ps = std::to_string(p);
  if (!is_prime(p)) throw PreconditionError(ps + " is not prime");
  if (Integer(static_cast<unsigned long>(p)) <= delta) throw PreconditionError("p=" + ps + " must exceed delta");
  if (static_cast<int>(p) <= L.dim()) throw PreconditionError("p=" + ps + " must exceed the dimension");
  if (static_cast<int>(p) <= L.nilpotency_class()) throw PreconditionError("p=" + ps + " must exceed the class");
  if (delta % static_cast<unsigned long>(p) == 0) throw PreconditionError("p=" + ps + " divides delta");
  ModPLieRing out;
  out.prime = p;
  out.dim = L.dim();
  out.nil_class = L.nilpotency_class();
  int m = out.dim;
  out.sc.assign(static_cast<std::size_t>(m) * m * m, 0);
  for (const auto& s : L.structure_constants()) {
    u64 c = reduce_rational(s.c, p);
    out.sc[(static_cast<std::size_t>(s.i) * m + s.j) * m + s.k] = static_cast<std::uint32_t>(c);
    out.sc[(static_cast<std::size_t>(s.j) * m + s.i) * m + s.k] = static_cast<std::uint32_t>((p - c) % p);
  }
  for (const auto& a : actions) {
    MatP r = MatP::from_rational(a, p);
    inverse_mod_p(r);  // throws when the reduction is singular
    out.actions.push_back(std::move(r));
  }
  return out;
}

bool IdealModP::contains(const VecP& v, u64 p) const {
  return leading_index(reduce_against(basis, v, p)) < 0;
}

bool is_invariant_ideal(const ModPLieRing& Lp, const std::vector<VecP>& rref) {
  u64 p = Lp.prime;
  for (const auto& u : rref) {
    for (int j = 0; j < Lp.dim; ++j) {
      VecP e(static_cast<std::size_t>(Lp.dim), 0);
      e[static_cast<std::size_t>(j)] = 1;
      if (leading_index(reduce_against(rref, Lp.bracket(e, u), p)) >= 0) return false;
    }
    for (const auto& a : Lp.actions)
      if (leading_index(reduce_against(rref, a.apply(u), p)) >= 0) return false;
  }
  return true;
}

namespace {

IdealModP make_ideal(std::vector<VecP> rref, int dim) {
  IdealModP w;
  w.codim = dim - static_cast<int>(rref.size());
  w.basis = std::move(rref);
  return w;
}

std::vector<VecP> cyclic_ideal(const ModPLieRing& Lp, const VecP& v) {
  u64 p = Lp.prime;
  int m = Lp.dim;
  std::vector<VecP> rref;
  std::vector<VecP> queue;
  auto add = [&](const VecP& x) {
    VecP r = reduce_against(rref, x, p);
    if (leading_index(r) < 0) return;
    queue.push_back(r);
    insert_reduced(rref, std::move(r), p);
  };
  add(v);
  VecP e(static_cast<std::size_t>(m), 0);
  for (std::size_t q = 0; q < queue.size() && static_cast<int>(rref.size()) < m; ++q) {
    VecP u = queue[q];
    for (int j = 0; j < m; ++j) {
      std::fill(e.begin(), e.end(), 0);
      e[static_cast<std::size_t>(j)] = 1;
      add(Lp.bracket(e, u));
    }
    for (const auto& a : Lp.actions) add(a.apply(u));
  }
  return rref;
}

u64 ipow(u64 b, int e, u64 cap) {
  u64 r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > cap / b) return cap + 1;
    r *= b;
  }
  return r;
}

}  // namespace

std::vector<IdealModP> invariant_ideals_mod_p(const ModPLieRing& Lp, const IdealSearchOptions& opt) {
  u64 p = Lp.prime;
  int m = Lp.dim;
  // Projective points: leading coordinate l equal to 1, followed by arbitrary digits.
  std::vector<u64> counts(static_cast<std::size_t>(m));
  u64 total = 0;
  for (int l = 0; l < m; ++l) {
    counts[static_cast<std::size_t>(l)] = ipow(p, m - 1 - l, opt.budget);
    total += counts[static_cast<std::size_t>(l)];
    if (total > opt.budget) throw BudgetError("projective point count exceeds the ideal search budget");
  }
  std::vector<std::vector<VecP>> cyclic(total);
  const long long ntotal = static_cast<long long>(total);
#ifdef _OPENMP
  int nthreads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 256) num_threads(nthreads)
#endif
  for (long long t = 0; t < ntotal; ++t) {
    u64 idx = static_cast<u64>(t);
    int l = 0;
    while (idx >= counts[static_cast<std::size_t>(l)]) idx -= counts[static_cast<std::size_t>(l++)];
    VecP v(static_cast<std::size_t>(m), 0);
    v[static_cast<std::size_t>(l)] = 1;
    for (int i = m - 1; i > l; --i) {
      v[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(idx % p);
      idx /= p;
    }
    cyclic[static_cast<std::size_t>(t)] = cyclic_ideal(Lp, v);
  }
  std::sort(cyclic.begin(), cyclic.end());
  cyclic.erase(std::unique(cyclic.begin(), cyclic.end()), cyclic.end());

  std::set<std::vector<VecP>> seen(cyclic.begin(), cyclic.end());
  seen.insert(std::vector<VecP>{});
  std::vector<std::vector<VecP>> queue(seen.begin(), seen.end());
  for (std::size_t q = 0; q < queue.size(); ++q) {
    for (const auto& c : cyclic) {
      std::vector<VecP> rows = queue[q];
      bool grows = false;
      for (const auto& v : c)
        if (leading_index(reduce_against(queue[q], v, p)) >= 0) grows = true;
      if (!grows) continue;
      rows.insert(rows.end(), c.begin(), c.end());
      auto joined = rref_mod_p(std::move(rows), p);
      if (seen.insert(joined).second) {
        queue.push_back(std::move(joined));
        if (queue.size() > opt.budget) throw BudgetError("invariant ideal count exceeds budget");
      }
    }
  }
  std::vector<IdealModP> out;
  for (const auto& b : seen) out.push_back(make_ideal(b, m));
  return out;
}

std::vector<IdealModP> invariant_ideals_exhaustive(const ModPLieRing& Lp, u64 budget) {
  u64 p = Lp.prime;
  int m = Lp.dim;
  if (m > 20) throw BudgetError("dimension too large for exhaustive subspace search");
  u64 examined = 0;
  std::vector<IdealModP> out;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> piv;
    for (int c = 0; c < m; ++c)
      if (mask & (1u << c)) piv.push_back(c);
    std::vector<std::pair<int, int>> free;
    for (std::size_t r = 0; r < piv.size(); ++r)
      for (int c = piv[r] + 1; c < m; ++c)
        if (!(mask & (1u << c))) free.emplace_back(static_cast<int>(r), c);
    u64 count = ipow(p, static_cast<int>(free.size()), budget);
    examined += count;
    if (examined > budget) throw BudgetError("subspace count exceeds the exhaustive search budget");
    std::vector<std::uint32_t> digits(free.size(), 0);
    for (u64 t = 0; t < count; ++t) {
      std::vector<VecP> rows(piv.size(), VecP(static_cast<std::size_t>(m), 0));
      for (std::size_t r = 0; r < piv.size(); ++r) rows[r][static_cast<std::size_t>(piv[r])] = 1;
      for (std::size_t f = 0; f < free.size(); ++f)
        rows[static_cast<std::size_t>(free[f].first)][static_cast<std::size_t>(free[f].second)] = digits[f];
      if (is_invariant_ideal(Lp, rows)) out.push_back(make_ideal(rows, m));
      for (std::size_t f = 0; f < digits.size(); ++f) {
        if (++digits[f] < p) break;
        digits[f] = 0;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DeltaReport delta_mod_p(const ModPLieRing& Lp, const std::vector<IdealModP>& ideals) {
  DeltaReport rep;
  rep.prime = Lp.prime;
  int m = Lp.dim;
  for (int d = 0; d <= m; ++d) {
    std::vector<VecP> inter;
    for (int i = 0; i < m; ++i) {
      VecP e(static_cast<std::size_t>(m), 0);
      e[static_cast<std::size_t>(i)] = 1;
      inter.push_back(e);
    }
    for (const auto& w : ideals)
      if (w.codim <= d) inter = intersect_mod_p(inter, w.basis, m, Lp.prime);
    if (inter.empty()) {
      rep.delta_p = d;
      for (const auto& w : ideals)
        if (w.codim <= d) rep.witness_family.push_back(w);
      break;
    }
  }
  rep.stable_min = rep.delta_p;
  return rep;
}

DeltaReport delta_mod_p(const ModPLieRing& Lp, const IdealSearchOptions& opt) {
  return delta_mod_p(Lp, invariant_ideals_mod_p(Lp, opt));
}

void summarize_delta(std::vector<DeltaReport>& reports) {
  if (reports.empty()) return;
  int lo = reports[0].delta_p, hi = lo;
  for (const auto& r : reports) {
    lo = std::min(lo, r.delta_p);
    hi = std::max(hi, r.delta_p);
  }
  for (auto& r : reports) {
    r.stable_min = lo;
    r.unstable = lo != hi;
  }
}

PolyP charpoly_mod_p(const MatP& m) {
  int n = m.n;
  u64 p = m.p;
  if (static_cast<u64>(n) >= p) throw PreconditionError("characteristic polynomial mod p needs p > n");
  PolyP c(static_cast<std::size_t>(n) + 1, 0);
  c[static_cast<std::size_t>(n)] = 1;
  MatP mk(n, p);
  for (int k = 1; k <= n; ++k) {
    MatP t = m * mk;
    for (int i = 0; i < n; ++i) t(i, i) = static_cast<std::uint32_t>((t(i, i) + c[static_cast<std::size_t>(n - k + 1)]) % p);
    mk = t;
    MatP am = m * mk;
    u64 tr = 0;
    for (int i = 0; i < n; ++i) tr = (tr + am(i, i)) % p;
    c[static_cast<std::size_t>(n - k)] = (p - tr) % p * mod_inv(static_cast<u64>(k), p) % p;
  }
  return c;
}

std::vector<std::pair<u64, int>> roots_with_multiplicity(PolyP f, u64 p) {
  std::vector<std::pair<u64, int>> out;
  for (u64 r = 0; r < p && f.size() > 1; ++r) {
    int mult = 0;
    while (f.size() > 1) {
      // Synthetic division by (x - r).
      PolyP q(f.size() - 1, 0);
      u64 carry = 0;
      for (std::size_t i = f.size(); i-- > 1;) {
        carry = (f[i] + carry * r) % p;
        q[i - 1] = carry;
      }
      u64 rem = (f[0] + carry * r) % p;
      if (rem) break;
      f = std::move(q);
      ++mult;
    }
    if (mult) out.emplace_back(r, mult);
  }
  return out;
}

MatrixOrderReport matrix_order_report(const MatP& m, u64 budget) {
  MatrixOrderReport rep;
  u64 p = m.p;
  MatP pw = m;
  u64 e = 1;
  while (!pw.is_identity()) {
    if (++e > budget) throw BudgetError("matrix order exceeds budget " + std::to_string(budget));
    pw = pw * m;
  }
  rep.order = e;
  auto roots = roots_with_multiplicity(charpoly_mod_p(m), p);
  int total = 0;
  for (const auto& r : roots) total += r.second;
  rep.splits = total == m.n;
  if (rep.splits) {
    MatP prod = MatP::identity(m.n, p);
    for (const auto& r : roots) {
      MatP t = m;
      for (int i = 0; i < m.n; ++i) t(i, i) = static_cast<std::uint32_t>((t(i, i) + p - r.first) % p);
      prod = prod * t;
    }
    rep.diagonalizable = std::all_of(prod.a.begin(), prod.a.end(), [](std::uint32_t x) { return x == 0; });
    rep.divides_p_minus_1_times_p = ((p - 1) * p) % e == 0;
    if (rep.diagonalizable) rep.divides_p_minus_1 = (p - 1) % e == 0;
  }
  return rep;
}

u64 matrix_order_mod_p(const MatP& m, u64 p, u64 budget) {
  if (m.p != p) throw PreconditionError("matrix modulus mismatch");
  auto rep = matrix_order_report(m, budget);
  if (!rep.divides_p_minus_1_times_p || !rep.divides_p_minus_1)
    throw VerificationError("matrix order " + std::to_string(rep.order) + " violates the divisibility law mod " +
                            std::to_string(p));
  return rep.order;
}

bool splits_like_char0(const RatMatrix& m, u64 p) {
  RatPoly f = characteristic_polynomial(m);
  PolyP fp;
  for (const auto& c : f) fp.push_back(reduce_rational(c, p));
  auto roots = roots_with_multiplicity(fp, p);
  int total = 0;
  for (const auto& r : roots) total += r.second;
  return total == m.n && static_cast<int>(roots.size()) == squarefree_degree(f);
}

}  // namespace rfg
