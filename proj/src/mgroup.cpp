#include "rfg/mgroup.hpp"

#include <algorithm>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rfg {

std::size_t hash_element(const GroupElement& g) {
  std::size_t h = static_cast<std::size_t>(g.f) * 0x51ed27ULL;
  for (const auto& x : g.k) h = hash_combine(h, hash_scalar(x));
  for (auto e : g.h) h = hash_combine(h, static_cast<std::size_t>(e));
  return h;
}

namespace {

std::string where(const std::string& what, std::size_t idx) { return what + " " + std::to_string(idx + 1); }

bool matrix_in_localization(const RatMatrix& m, const Integer& delta) {
  return std::all_of(m.a.begin(), m.a.end(), [&](const Scalar& x) { return divides_power_of(x.get_den(), delta); });
}

std::string bracket_automorphism_failure(const LieRing& L, const RatMatrix& a) {
  int m = L.dim();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      Vec lhs = a.apply(L.bracket(unit_vec(m, i), unit_vec(m, j)));
      Vec rhs = L.bracket(a.column(i), a.column(j));
      if (lhs != rhs)
        return "bracket automorphism identity fails on (v" + std::to_string(i + 1) + ", v" + std::to_string(j + 1) + ")";
    }
  return {};
}

Integer lcm_int(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

ValidationReport fail(std::string msg) { return {false, std::move(msg)}; }

}  // namespace

ValidationReport validate(const MGroupDescription& d) {
  if (d.dim_k < 1) return fail("dim_k must be positive");
  if (d.rank_h < 0) return fail("rank_h must be non-negative");
  if (d.delta < 1) return fail("delta must be positive");
  if (static_cast<int>(d.actions.size()) != d.rank_h) return fail("number of action matrices differs from rank_h");
  std::optional<LieRing> L;
  try {
    L.emplace(d.dim_k, d.structure_constants);
  } catch (const Error& e) {
    return fail(e.what());
  }
  if (L->nilpotency_class() != d.nilpotency_class)
    return fail("declared nilpotency class " + std::to_string(d.nilpotency_class) + " but computed " +
                std::to_string(L->nilpotency_class()));
  if (L->nilpotency_class() > LieRing::kMaxBchClass) return fail("nilpotency class above 4 is unsupported");
  for (const auto& sc : d.structure_constants)
    if (!divides_power_of(sc.c.get_den(), d.delta)) return fail("structure constant denominator not a power of delta");

  auto check_action = [&](const RatMatrix& a, const std::string& label) -> std::string {
    if (a.n != d.dim_k) return label + " has wrong size";
    if (!matrix_in_localization(a, d.delta)) return label + " has entries outside Z[1/delta]";
    if (determinant(a) == 0) return label + " is singular";
    if (!matrix_in_localization(inverse(a), d.delta)) return label + " is not invertible over Z[1/delta]";
    std::string b = bracket_automorphism_failure(*L, a);
    if (!b.empty()) return label + ": " + b;
    return {};
  };
  for (std::size_t j = 0; j < d.actions.size(); ++j) {
    std::string err = check_action(d.actions[j], where("action", j));
    if (!err.empty()) return fail(err);
  }
  for (std::size_t a = 0; a < d.actions.size(); ++a)
    for (std::size_t b = a + 1; b < d.actions.size(); ++b)
      if (d.actions[a] * d.actions[b] != d.actions[b] * d.actions[a])
        return fail("actions " + std::to_string(a + 1) + " and " + std::to_string(b + 1) + " do not commute");

  if (d.finite_part) {
    const auto& F = *d.finite_part;
    int n = F.order;
    if (n < 1 || static_cast<int>(F.table.size()) != n || static_cast<int>(F.actions.size()) != n)
      return fail("finite part: table and actions must have one entry per element");
    for (const auto& row : F.table) {
      if (static_cast<int>(row.size()) != n) return fail("finite part: table row of wrong length");
      std::vector<bool> hit(static_cast<std::size_t>(n), false);
      for (int x : row) {
        if (x < 0 || x >= n) return fail("finite part: table entry out of range");
        hit[static_cast<std::size_t>(x)] = true;
      }
      if (std::find(hit.begin(), hit.end(), false) != hit.end()) return fail("finite part: table row is not a permutation");
    }
    for (int a = 0; a < n; ++a)
      if (F.table[0][static_cast<std::size_t>(a)] != a || F.table[static_cast<std::size_t>(a)][0] != a)
        return fail("finite part: element 0 is not the identity");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          int ab = F.table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
          int bc = F.table[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
          if (F.table[static_cast<std::size_t>(ab)][static_cast<std::size_t>(c)] !=
              F.table[static_cast<std::size_t>(a)][static_cast<std::size_t>(bc)])
            return fail("finite part: table is not associative");
        }
    if (!F.actions[0].is_identity()) return fail("finite part: identity must act trivially");
    for (int s = 0; s < n; ++s) {
      std::string err = check_action(F.actions[static_cast<std::size_t>(s)], where("finite action", static_cast<std::size_t>(s)));
      if (!err.empty()) return fail(err);
      for (const auto& x : d.actions)
        if (x * F.actions[static_cast<std::size_t>(s)] != F.actions[static_cast<std::size_t>(s)] * x)
          return fail("finite action " + std::to_string(s) + " does not commute with the Z^n actions");
      for (int t = 0; t < n; ++t) {
        int st = F.table[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
        if (F.actions[static_cast<std::size_t>(s)] * F.actions[static_cast<std::size_t>(t)] != F.actions[static_cast<std::size_t>(st)])
          return fail("finite actions do not respect the multiplication table at (" + std::to_string(s) + "," +
                      std::to_string(t) + ")");
      }
    }
  }

  Integer amb = lcm_int(d.delta, Integer(L->bch_radical()));
  if (d.generators) {
    if (d.generators->empty()) return fail("generator list is empty");
    for (std::size_t g = 0; g < d.generators->size(); ++g) {
      const auto& x = (*d.generators)[g];
      if (static_cast<int>(x.k.size()) != d.dim_k || static_cast<int>(x.h.size()) != d.rank_h)
        return fail(where("generator", g) + " has wrong shape");
      if (x.f < 0 || x.f >= (d.finite_part ? d.finite_part->order : 1)) return fail(where("generator", g) + " has bad finite index");
      for (const auto& c : x.k)
        if (!divides_power_of(c.get_den(), amb)) return fail(where("generator", g) + " has coordinates outside Z[1/delta']");
    }
  }

  MGroup G(d, MGroup::Unchecked{});
  for (std::size_t r = 0; r < d.relators.size(); ++r) {
    for (int letter : d.relators[r])
      if (letter == 0 || std::abs(letter) > static_cast<int>(G.generators().size()))
        return fail(where("relator", r) + " uses an unknown generator");
    if (!G.is_identity(G.evaluate_word(d.relators[r]))) return fail(where("relator", r) + " does not evaluate to the identity");
  }
  return {};
}

namespace {

MGroupDescription checked(MGroupDescription d) {
  auto rep = validate(d);
  if (!rep.ok) throw ValidationFailure("invalid group '" + d.name + "': " + rep.message);
  return d;
}

}  // namespace

MGroup::MGroup(MGroupDescription d) : MGroup(checked(std::move(d)), Unchecked{}) {}

MGroup::MGroup(MGroupDescription d, Unchecked) : desc_(std::move(d)), lie_(desc_.dim_k, desc_.structure_constants) {
  mpz_lcm(ambient_delta_.get_mpz_t(), desc_.delta.get_mpz_t(), Integer(lie_.bch_radical()).get_mpz_t());
  if (desc_.generators) {
    generators_ = *desc_.generators;
  } else {
    for (int i = 0; i < dim(); ++i) generators_.push_back(from_k(unit_vec(dim(), i)));
    for (int j = 0; j < rank(); ++j) {
      GroupElement g = identity();
      g.h[static_cast<std::size_t>(j)] = 1;
      generators_.push_back(g);
    }
    for (int s = 1; s < finite_order(); ++s) {
      GroupElement g = identity();
      g.f = s;
      generators_.push_back(g);
    }
  }
  for (const auto& a : desc_.actions) {
    std::vector<RatMatrix> pows(2 * kActionCache + 1);
    RatMatrix inv = inverse(a);
    pows[kActionCache] = RatMatrix::identity(dim());
    for (int e = 1; e <= kActionCache; ++e) {
      pows[static_cast<std::size_t>(kActionCache + e)] = a * pows[static_cast<std::size_t>(kActionCache + e - 1)];
      pows[static_cast<std::size_t>(kActionCache - e)] = inv * pows[static_cast<std::size_t>(kActionCache - e + 1)];
    }
    xi_pow_.push_back(std::move(pows));
  }
  int n = finite_order();
  finite_inverse_.assign(static_cast<std::size_t>(n), 0);
  if (desc_.finite_part)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (desc_.finite_part->table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] == 0)
          finite_inverse_[static_cast<std::size_t>(a)] = b;
}

std::vector<RatMatrix> MGroup::all_actions() const {
  std::vector<RatMatrix> out = desc_.actions;
  if (desc_.finite_part)
    for (int s = 1; s < desc_.finite_part->order; ++s) out.push_back(desc_.finite_part->actions[static_cast<std::size_t>(s)]);
  return out;
}

GroupElement MGroup::identity() const {
  GroupElement g;
  g.k = zero_vec(dim());
  g.h.assign(static_cast<std::size_t>(rank()), 0);
  return g;
}

bool MGroup::is_identity(const GroupElement& g) const {
  return g.f == 0 && std::all_of(g.h.begin(), g.h.end(), [](i64 x) { return x == 0; }) && is_zero(g.k);
}

bool MGroup::in_k(const GroupElement& g) const {
  return g.f == 0 && std::all_of(g.h.begin(), g.h.end(), [](i64 x) { return x == 0; });
}

GroupElement MGroup::from_k(const Vec& v) const {
  GroupElement g = identity();
  g.k = v;
  return g;
}

void MGroup::check_conforms(const GroupElement& g) const {
  if (static_cast<int>(g.k.size()) != dim() || static_cast<int>(g.h.size()) != rank() || g.f < 0 || g.f >= finite_order())
    throw PreconditionError("element does not conform to group '" + name() + "'");
}

int MGroup::finite_mul(int a, int b) const {
  if (!desc_.finite_part) return 0;
  return desc_.finite_part->table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

int MGroup::finite_inv(int a) const { return finite_inverse_[static_cast<std::size_t>(a)]; }

const RatMatrix& MGroup::xi_power(int j, i64 e, RatMatrix& scratch) const {
  if (e >= -kActionCache && e <= kActionCache)
    return xi_pow_[static_cast<std::size_t>(j)][static_cast<std::size_t>(e + kActionCache)];
  scratch = matrix_power(desc_.actions[static_cast<std::size_t>(j)], e);
  return scratch;
}

Vec MGroup::act(const std::vector<i64>& a, int f, const Vec& v) const {
  Vec out = v;
  if (f != 0) out = desc_.finite_part->actions[static_cast<std::size_t>(f)].apply(out);
  RatMatrix scratch;
  for (int j = 0; j < rank(); ++j)
    if (a[static_cast<std::size_t>(j)] != 0) out = xi_power(j, a[static_cast<std::size_t>(j)], scratch).apply(out);
  return out;
}

GroupElement MGroup::multiply(const GroupElement& g, const GroupElement& h) const {
  check_conforms(g);
  check_conforms(h);
  GroupElement r;
  r.k = lie_.bch(g.k, act(g.h, g.f, h.k));
  r.h.resize(g.h.size());
  for (std::size_t j = 0; j < g.h.size(); ++j)
    if (__builtin_add_overflow(g.h[j], h.h[j], &r.h[j])) throw Error("exponent overflow");
  r.f = finite_mul(g.f, h.f);
  return r;
}

GroupElement MGroup::invert(const GroupElement& g) const {
  check_conforms(g);
  GroupElement r;
  r.h.resize(g.h.size());
  for (std::size_t j = 0; j < g.h.size(); ++j) r.h[j] = -g.h[j];
  r.f = finite_inv(g.f);
  // η(f^{-1}) Ξ(-a)(-λ); the actions commute so one combined application suffices.
  r.k = act(r.h, r.f, -g.k);
  return r;
}

GroupElement MGroup::power(const GroupElement& g, i64 t) const {
  GroupElement base = t < 0 ? invert(g) : g;
  unsigned long long k = t < 0 ? static_cast<unsigned long long>(-(t + 1)) + 1 : static_cast<unsigned long long>(t);
  GroupElement r = identity();
  while (k) {
    if (k & 1) r = multiply(r, base);
    k >>= 1;
    if (k) base = multiply(base, base);
  }
  return r;
}

GroupElement MGroup::evaluate_word(const std::vector<int>& word) const {
  GroupElement r = identity();
  for (int letter : word) {
    const auto& s = generators_.at(static_cast<std::size_t>(std::abs(letter) - 1));
    r = multiply(r, letter > 0 ? s : invert(s));
  }
  return r;
}

GroupElement multiply(const GroupElement& g, const GroupElement& h, const MGroup& G) { return G.multiply(g, h); }
GroupElement invert(const GroupElement& g, const MGroup& G) { return G.invert(g); }
GroupElement power(const GroupElement& g, i64 t, const MGroup& G) { return G.power(g, t); }

CoordinateForm coordinate_form_of(const Vec& k, const Integer& delta) {
  CoordinateForm cf;
  std::vector<LocalizedForm> loc;
  for (const auto& x : k) {
    loc.push_back(localize(x, delta));
    cf.j = std::max(cf.j, loc.back().delta_exponent);
  }
  cf.gcd = 0;
  for (const auto& l : loc) {
    Integer s;
    mpz_pow_ui(s.get_mpz_t(), delta.get_mpz_t(), cf.j - l.delta_exponent);
    cf.mu.push_back(l.numerator * s);
    mpz_gcd(cf.gcd.get_mpz_t(), cf.gcd.get_mpz_t(), cf.mu.back().get_mpz_t());
  }
  return cf;
}

CoordinateForm coordinate_form(const GroupElement& g, const MGroup& G) {
  G.check_conforms(g);
  if (!G.in_k(g)) throw PreconditionError("element is not in K");
  if (G.is_identity(g)) throw PreconditionError("identity has no coordinate form");
  return coordinate_form_of(g.k, G.ambient_delta());
}

Ball enumerate_ball(const MGroup& G, int r, const BallOptions& opt) {
  if (r < 0) throw PreconditionError("radius must be non-negative");
  std::vector<GroupElement> gens = G.generators();
  for (const auto& s : G.generators()) gens.push_back(G.invert(s));

  Ball B;
  B.radius = r;
  std::vector<std::size_t> hashes;
  auto idx_hash = [&](std::size_t i) { return hashes[i]; };
  auto idx_eq = [&](std::size_t a, std::size_t b) { return B.elements[a] == B.elements[b]; };
  std::unordered_set<std::size_t, decltype(idx_hash), decltype(idx_eq)> seen(1024, idx_hash, idx_eq);

  auto try_add = [&](GroupElement&& g, std::size_t h, int norm) {
    B.elements.push_back(std::move(g));
    hashes.push_back(h);
    if (seen.insert(B.elements.size() - 1).second) {
      B.norm.push_back(norm);
      if (B.elements.size() > opt.budget) throw BudgetError("ball exceeds the element budget");
    } else {
      B.elements.pop_back();
      hashes.pop_back();
    }
  };

  try_add(G.identity(), hash_element(G.identity()), 0);
  B.layer_end.push_back(1);
  std::size_t begin = 0;
  const std::size_t ng = gens.size();
  for (int radius = 1; radius <= r; ++radius) {
    std::size_t end = B.elements.size();
    if (opt.parallel) {
      std::size_t total = (end - begin) * ng;
      std::vector<GroupElement> prod(total);
      std::vector<std::size_t> ph(total);
      const long long ntotal = static_cast<long long>(total);
#ifdef _OPENMP
      int nthreads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
      for (long long t = 0; t < ntotal; ++t) {
        std::size_t i = begin + static_cast<std::size_t>(t) / ng, s = static_cast<std::size_t>(t) % ng;
        prod[static_cast<std::size_t>(t)] = G.multiply(B.elements[i], gens[s]);
        ph[static_cast<std::size_t>(t)] = hash_element(prod[static_cast<std::size_t>(t)]);
      }
      for (std::size_t t = 0; t < total; ++t) try_add(std::move(prod[t]), ph[t], radius);
    } else {
      for (std::size_t i = begin; i < end; ++i)
        for (const auto& s : gens) {
          GroupElement y = G.multiply(B.elements[i], s);
          std::size_t h = hash_element(y);
          try_add(std::move(y), h, radius);
        }
    }
    begin = end;
    B.layer_end.push_back(B.elements.size());
  }
  return B;
}

std::vector<CoefficientRow> coefficient_stats(const MGroup& G, const Ball& B) {
  std::vector<CoefficientRow> rows;
  CoefficientRow cur;
  std::size_t idx = 0;
  for (int r = 0; r <= B.radius; ++r) {
    for (; idx < B.size(r); ++idx) {
      const auto& g = B.elements[idx];
      if (!G.in_k(g)) continue;
      ++cur.k_size;
      if (is_zero(g.k)) continue;
      CoordinateForm cf = coordinate_form_of(g.k, G.ambient_delta());
      for (const auto& mu : cf.mu)
        if (abs(mu) > cur.max_numerator) cur.max_numerator = abs(mu);
      cur.max_delta_exponent = std::max(cur.max_delta_exponent, cf.j);
    }
    cur.r = r;
    cur.ball_size = B.size(r);
    rows.push_back(cur);
  }
  return rows;
}

std::vector<CoefficientRow> coefficient_stats(const MGroup& G, int r_max, const BallOptions& opt) {
  return coefficient_stats(G, enumerate_ball(G, r_max, opt));
}

BallReport ball(const MGroup& G, int r, const BallOptions& opt) {
  Ball B = enumerate_ball(G, r, opt);
  auto stats = coefficient_stats(G, B);
  BallReport rep;
  rep.radius = r;
  rep.size = B.elements.size();
  rep.max_numerator = stats.back().max_numerator;
  rep.max_delta_exponent = stats.back().max_delta_exponent;
  rep.elements = std::move(B.elements);
  return rep;
}

GroupElement lcm_witness(const MGroup& G, const GroupElement& g, int r) {
  G.check_conforms(g);
  if (!G.in_k(g)) throw PreconditionError("lcm witness needs an element of K");
  if (G.is_identity(g)) throw PreconditionError("lcm witness of the identity");
  if (r < 1) throw PreconditionError("radius must be positive");
  return G.power(g, lcm_upto(r));
}

}  // namespace rfg
