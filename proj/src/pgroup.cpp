#include "rfg/pgroup.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

namespace rfg {

namespace {

i64 checked(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error("small rational overflow");
  return static_cast<i64>(v);
}

}  // namespace

SmallRat::SmallRat(i64 num, i64 den) {
  if (den == 0) throw Error("small rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i64 g = std::gcd(num, den);
  n = g ? num / g : 0;
  d = g ? den / g : 1;
}

SmallRat operator+(const SmallRat& a, const SmallRat& b) {
  if (a.d == 1 && b.d == 1) return SmallRat(checked(static_cast<__int128>(a.n) + b.n));
  i64 g = std::gcd(a.d, b.d);
  __int128 num = static_cast<__int128>(a.n) * (b.d / g) + static_cast<__int128>(b.n) * (a.d / g);
  return SmallRat(checked(num), checked(static_cast<__int128>(a.d / g) * b.d));
}

SmallRat operator-(const SmallRat& a, const SmallRat& b) { return a + SmallRat(-b.n, b.d); }

SmallRat operator*(const SmallRat& a, const SmallRat& b) {
  if (a.n == 0 || b.n == 0) return SmallRat();
  i64 g1 = std::gcd(a.n, b.d), g2 = std::gcd(b.n, a.d);
  return SmallRat(checked(static_cast<__int128>(a.n / g1) * (b.n / g2)),
                  checked(static_cast<__int128>(a.d / g2) * (b.d / g1)));
}

SmallRat operator/(const SmallRat& a, const SmallRat& b) {
  if (b.n == 0) throw Error("small rational division by zero");
  return a * SmallRat(b.d, b.n);
}

Vec malcev_coordinates(const LieRing& L, const Vec& log_coords) {
  int m = L.dim();
  Vec z = zero_vec(m), x = log_coords;
  for (int i = 0; i < m; ++i) {
    z[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
    if (z[static_cast<std::size_t>(i)] != 0) x = L.bch(scale(unit_vec(m, i), -z[static_cast<std::size_t>(i)]), x);
  }
  return z;
}

Vec log_from_malcev(const LieRing& L, const Vec& z) {
  int m = L.dim();
  Vec x = zero_vec(m);
  for (int i = m - 1; i >= 0; --i)
    if (z[static_cast<std::size_t>(i)] != 0) x = L.bch(scale(unit_vec(m, i), z[static_cast<std::size_t>(i)]), x);
  return x;
}

MalcevEnvelope::MalcevEnvelope(const MGroup& G, u64 p, int a)
    : G_(G), p_(p), a_(a), m_(G.dim()), c_(G.lie().nilpotency_class()) {
  if (a < 1) throw PreconditionError("envelope exponent must be positive");
  q_ = 1;
  for (int i = 0; i < a; ++i) {
    if (q_ > (1ULL << 31) / p) throw BudgetError("envelope modulus too large");
    q_ *= p;
  }
  table_.dim = m_;
  for (const auto& s : G.lie().structure_constants()) {
    if (!s.c.get_num().fits_slong_p() || !s.c.get_den().fits_slong_p()) throw UnsupportedError("structure constant too large");
    table_.entries.push_back({s.i, s.j, s.k, SmallRat(s.c.get_num().get_si(), s.c.get_den().get_si())});
  }
  for (const auto& g : G.generators()) gens_.push_back(image(g));
}

std::vector<SmallRat> MalcevEnvelope::to_log(const Elem& z) const {
  std::vector<SmallRat> x(static_cast<std::size_t>(m_), SmallRat());
  for (int i = m_ - 1; i >= 0; --i) {
    if (!z[static_cast<std::size_t>(i)]) continue;
    std::vector<SmallRat> u(static_cast<std::size_t>(m_), SmallRat());
    u[static_cast<std::size_t>(i)] = SmallRat(static_cast<long>(z[static_cast<std::size_t>(i)]));
    x = table_.bch(u, x, c_);
  }
  return x;
}

MalcevEnvelope::Elem MalcevEnvelope::from_log(const std::vector<SmallRat>& x0) const {
  std::vector<SmallRat> x = x0;
  Elem out(static_cast<std::size_t>(m_), 0);
  for (int i = 0; i < m_; ++i) {
    SmallRat zi = x[static_cast<std::size_t>(i)];
    if (zi.n == 0) continue;
    if (zi.d != 1) throw UnsupportedError("non-integral Mal'cev coordinate; generating set does not match the lattice");
    i64 r = zi.n % static_cast<i64>(q_);
    out[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(r < 0 ? r + static_cast<i64>(q_) : r);
    std::vector<SmallRat> u(static_cast<std::size_t>(m_), SmallRat());
    u[static_cast<std::size_t>(i)] = SmallRat(-zi.n, 1);
    x = table_.bch(u, x, c_);
  }
  return out;
}

MalcevEnvelope::Elem MalcevEnvelope::mul(const Elem& x, const Elem& y) const {
  return from_log(table_.bch(to_log(x), to_log(y), c_));
}

MalcevEnvelope::Elem MalcevEnvelope::inv(const Elem& x) const {
  std::vector<SmallRat> l = to_log(x);
  for (auto& v : l) v = SmallRat(-v.n, v.d);
  return from_log(l);
}

MalcevEnvelope::Elem MalcevEnvelope::pow(const Elem& x, u64 e) const {
  Elem r = identity(), b = x;
  while (e) {
    if (e & 1) r = mul(r, b);
    e >>= 1;
    if (e) b = mul(b, b);
  }
  return r;
}

MalcevEnvelope::Elem MalcevEnvelope::comm(const Elem& x, const Elem& y) const {
  return mul(mul(inv(x), inv(y)), mul(x, y));
}

MalcevEnvelope::Elem MalcevEnvelope::image(const GroupElement& g) const {
  if (!G_.in_k(g)) throw UnsupportedError("nilpotent envelope needs elements of K");
  Vec z = malcev_coordinates(G_.lie(), g.k);
  Elem out(static_cast<std::size_t>(m_), 0);
  Integer q(static_cast<unsigned long>(q_));
  for (int i = 0; i < m_; ++i) {
    const Scalar& zi = z[static_cast<std::size_t>(i)];
    if (zi.get_den() != 1) throw UnsupportedError("element has non-integral Mal'cev coordinates");
    Integer r = zi.get_num() % q;
    if (r < 0) r += q;
    out[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(r.get_ui());
  }
  return out;
}

int MalcevEnvelope::depth(const Elem& x) const {
  int best = length();
  for (int i = 0; i < m_; ++i) {
    std::uint32_t v = x[static_cast<std::size_t>(i)];
    if (!v) continue;
    int j = 0;
    while (v % p_ == 0) {
      v /= static_cast<std::uint32_t>(p_);
      ++j;
    }
    best = std::min(best, j * m_ + i);
  }
  return best;
}

std::uint32_t MalcevEnvelope::lead(const Elem& x, int t) const {
  int j = t / m_, i = t % m_;
  u64 v = x[static_cast<std::size_t>(i)];
  for (int s = 0; s < j; ++s) v /= p_;
  return static_cast<std::uint32_t>(v % p_);
}

MalcevEnvelope::Elem MalcevEnvelope::pcgs(int t) const {
  Elem e = identity();
  u64 v = 1;
  for (int s = 0; s < t / m_; ++s) v *= p_;
  e[static_cast<std::size_t>(t % m_)] = static_cast<std::uint32_t>(v);
  return e;
}

PcSubgroup::PcSubgroup(const MalcevEnvelope* E)
    : E_(E), gen_(static_cast<std::size_t>(E->length())), powers_(static_cast<std::size_t>(E->length())) {}

PcSubgroup PcSubgroup::whole(const MalcevEnvelope* E) {
  PcSubgroup S(E);
  std::vector<Elem> queue;
  for (int t = 0; t < E->length(); ++t) S.insert(E->pcgs(t), queue);
  return S;
}

PcSubgroup::Elem PcSubgroup::sift(Elem x) const {
  const int L = E_->length();
  const u64 p = E_->prime();
  for (;;) {
    int t = E_->depth(x);
    if (t >= L || !gen_[static_cast<std::size_t>(t)]) return x;
    std::uint32_t d = E_->lead(x, t);
    x = E_->mul(powers_[static_cast<std::size_t>(t)][p - d], x);
  }
}

bool PcSubgroup::contains(const Elem& x) const { return E_->depth(sift(x)) >= E_->length(); }

void PcSubgroup::insert(Elem x, std::vector<Elem>& queue) {
  const u64 p = E_->prime();
  int t = E_->depth(x);
  std::uint32_t d = E_->lead(x, t);
  if (d != 1) x = E_->pow(x, mod_inv(d, p));
  std::vector<Elem> pw{E_->identity(), x};
  for (u64 c = 2; c < p; ++c) pw.push_back(E_->mul(pw.back(), x));
  queue.push_back(E_->mul(pw.back(), x));  // x^p
  for (const auto& g : gen_)
    if (g) queue.push_back(E_->comm(x, *g));
  gen_[static_cast<std::size_t>(t)] = x;
  powers_[static_cast<std::size_t>(t)] = std::move(pw);
}

void PcSubgroup::add(const Elem& x0) {
  std::vector<Elem> queue{x0};
  while (!queue.empty()) {
    Elem x = sift(std::move(queue.back()));
    queue.pop_back();
    if (E_->depth(x) < E_->length()) insert(std::move(x), queue);
  }
}

void PcSubgroup::close_normal() {
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& u : igs())
      for (const auto& y : E_->generators()) {
        Elem c = E_->mul(E_->mul(E_->inv(y), u), y);
        if (!contains(c)) {
          add(c);
          grew = true;
        }
      }
  }
}

int PcSubgroup::log_order() const {
  return static_cast<int>(std::count_if(gen_.begin(), gen_.end(), [](const auto& g) { return g.has_value(); }));
}

std::vector<int> PcSubgroup::depths() const {
  std::vector<int> out;
  for (std::size_t t = 0; t < gen_.size(); ++t)
    if (gen_[t]) out.push_back(static_cast<int>(t));
  return out;
}

std::vector<PcSubgroup::Elem> PcSubgroup::igs() const {
  std::vector<Elem> out;
  for (const auto& g : gen_)
    if (g) out.push_back(*g);
  return out;
}

std::vector<std::uint32_t> PcSubgroup::key() const {
  // Canonical generators: gen_t with zero digits at the other depths of the subgroup.
  const u64 p = E_->prime();
  std::vector<int> ds = depths();
  std::vector<std::uint32_t> out;
  for (std::size_t a = 0; a < ds.size(); ++a) {
    Elem u = *gen_[static_cast<std::size_t>(ds[a])];
    for (std::size_t b = a + 1; b < ds.size(); ++b) {
      int s = ds[b];
      // Digit at depth s: strip the prefix below s by left sifting through the full pcgs.
      Elem rest = u;
      for (;;) {
        int t = E_->depth(rest);
        if (t >= s) break;
        std::uint32_t d = E_->lead(rest, t);
        rest = E_->mul(E_->pow(E_->pcgs(t), p - d), rest);
      }
      if (E_->depth(rest) != s) continue;
      std::uint32_t d = E_->lead(rest, s);
      if (d) u = E_->mul(u, powers_[static_cast<std::size_t>(s)][p - d]);
    }
    out.push_back(static_cast<std::uint32_t>(ds[a]));
    out.insert(out.end(), u.begin(), u.end());
  }
  return out;
}

NilpotentOracle::NilpotentOracle(const MGroup& G, i64 bound, int envelope_override)
    : G_(G), bound_(bound), override_(envelope_override) {
  if (G.rank() != 0 || G.finite_order() != 1) throw UnsupportedError("nilpotent oracle needs n = 0 and trivial F");
  if (!G.lie().is_adapted()) throw UnsupportedError("nilpotent oracle needs an adapted basis");
  if (bound < 2) throw PreconditionError("bound must be at least 2");
  // Every generator has integral Mal'cev coordinates and every basis element u_i is reachable.
  for (const auto& g : G.generators())
    for (const auto& z : malcev_coordinates(G.lie(), g.k))
      if (z.get_den() != 1) throw UnsupportedError("generator with non-integral Mal'cev coordinates");
  BallOptions bo;
  bo.parallel = false;
  bo.budget = 200000;
  Ball B = enumerate_ball(G, std::min(8, 2 * G.lie().nilpotency_class() + 2), bo);
  for (int i = 0; i < G.dim(); ++i) {
    Vec target = log_from_malcev(G.lie(), unit_vec(G.dim(), i));
    bool found = std::any_of(B.elements.begin(), B.elements.end(), [&](const GroupElement& x) { return x.k == target; });
    if (!found) throw UnsupportedError("generators do not reach the Mal'cev basis element " + std::to_string(i + 1));
  }
}

int NilpotentOracle::envelope_exponent(u64 p) const {
  if (override_ > 0) return override_;
  // Largest a with p^a <= bound: a quotient of order p^k <= bound has exponent dividing p^k, and
  // Γ(p^k) consists of p^k-th powers, so the quotient factors through K/Γ(p^a).
  int a = 0;
  i64 v = 1;
  while (v <= bound_ / static_cast<i64>(p)) {
    v *= static_cast<i64>(p);
    ++a;
  }
  return a;
}

const NilpotentOracle::PrimeLevels& NilpotentOracle::prime_levels(u64 p) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(p);
  if (it != cache_.end()) return *it->second;
  auto pl = std::make_unique<PrimeLevels>();
  int a = envelope_exponent(p);
  pl->E = std::make_unique<MalcevEnvelope>(G_, p, a);
  const MalcevEnvelope* E = pl->E.get();

  // Runtime check that Γ(q) is compatible with the product: shifting arguments by q leaves the
  // product unchanged modulo q.
  std::mt19937_64 rng(p * 7919 + static_cast<u64>(a));
  const LieRing& L = G_.lie();
  for (int trial = 0; trial < 40; ++trial) {
    Vec z1 = zero_vec(G_.dim()), z2 = zero_vec(G_.dim()), s1 = zero_vec(G_.dim()), s2 = zero_vec(G_.dim());
    for (int i = 0; i < G_.dim(); ++i) {
      z1[static_cast<std::size_t>(i)] = static_cast<long>(rng() % E->modulus());
      z2[static_cast<std::size_t>(i)] = static_cast<long>(rng() % E->modulus());
      s1[static_cast<std::size_t>(i)] = z1[static_cast<std::size_t>(i)] + static_cast<long>((rng() % 5) * E->modulus());
      s2[static_cast<std::size_t>(i)] = z2[static_cast<std::size_t>(i)] + static_cast<long>((rng() % 5) * E->modulus());
    }
    auto prod = [&](const Vec& x, const Vec& y) {
      return E->image(G_.from_k(L.bch(log_from_malcev(L, x), log_from_malcev(L, y))));
    };
    if (prod(z1, z2) != prod(s1, s2)) throw UnsupportedError("congruence quotient is not well defined for this basis");
  }

  pl->levels.push_back({PcSubgroup::whole(E)});
  // Depth and leading exponents must behave like a polycyclic series.
  for (int trial = 0; trial < 40; ++trial) {
    PcSubgroup::Elem x = E->identity(), y = E->identity();
    for (int i = 0; i < G_.dim(); ++i) {
      x[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(rng() % E->modulus());
      y[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(rng() % E->modulus());
    }
    int t = std::min(E->depth(x), E->depth(y));
    if (t >= E->length()) continue;
    // Push the deeper one to the same depth by multiplying with a pcgs element.
    if (E->depth(x) != t) x = E->mul(E->pcgs(t), x);
    if (E->depth(y) != t) y = E->mul(E->pcgs(t), y);
    PcSubgroup::Elem xy = E->mul(x, y);
    if (E->depth(xy) < t || (E->lead(x, t) + E->lead(y, t)) % p != E->lead(xy, t) % p)
      throw UnsupportedError("Mal'cev filtration is not a polycyclic series for this prime");
  }

  int kmax = 0;
  for (i64 v = 1; v <= bound_ / static_cast<i64>(p); v *= static_cast<i64>(p)) ++kmax;
  for (int k = 0; k < kmax; ++k) {
    std::vector<PcSubgroup> next;
    std::set<std::vector<std::uint32_t>> seen;
    for (const auto& N : pl->levels[static_cast<std::size_t>(k)]) {
      PcSubgroup M(E);
      for (const auto& x : N.igs()) {
        M.add(E->pow(x, p));
        for (const auto& y : E->generators()) M.add(E->comm(x, y));
      }
      M.close_normal();
      std::vector<int> md = M.depths();
      std::vector<PcSubgroup::Elem> top;
      std::vector<PcSubgroup::Elem> nigs = N.igs();
      std::vector<int> nd = N.depths();
      for (std::size_t i = 0; i < nd.size(); ++i)
        if (std::find(md.begin(), md.end(), nd[i]) == md.end()) top.push_back(nigs[i]);
      int r = static_cast<int>(top.size());
      if (r == 0) continue;
      // Hyperplanes of N/M ≅ F_p^r: kernels of functionals normalised at the first nonzero entry.
      for (int lead = 0; lead < r; ++lead) {
        u64 tails = 1;
        for (int i = lead + 1; i < r; ++i) tails *= p;
        for (u64 t = 0; t < tails; ++t) {
          std::vector<u64> phi(static_cast<std::size_t>(r), 0);
          phi[static_cast<std::size_t>(lead)] = 1;
          u64 rest = t;
          for (int i = r - 1; i > lead; --i) {
            phi[static_cast<std::size_t>(i)] = rest % p;
            rest /= p;
          }
          PcSubgroup Np = M;
          for (int i = 0; i < r; ++i) {
            if (i == lead) continue;
            // Basis vector e_i - phi_i e_lead of ker(phi).
            PcSubgroup::Elem w = top[static_cast<std::size_t>(i)];
            if (phi[static_cast<std::size_t>(i)])
              w = E->mul(w, E->pow(top[static_cast<std::size_t>(lead)], p - phi[static_cast<std::size_t>(i)]));
            Np.add(w);
          }
          if (seen.insert(Np.key()).second) next.push_back(std::move(Np));
        }
      }
    }
    pl->levels.push_back(std::move(next));
  }
  const PrimeLevels& ref = *pl;
  cache_.emplace(p, std::move(pl));
  return ref;
}

std::optional<NilpotentDResult> NilpotentOracle::divisibility(const GroupElement& g) const {
  if (G_.is_identity(g)) throw PreconditionError("divisibility of the identity");
  std::vector<std::pair<i64, std::pair<u64, int>>> cells;
  for (u64 p : primes_up_to(static_cast<u64>(bound_))) {
    i64 v = static_cast<i64>(p);
    for (int k = 1; v <= bound_; ++k, v *= static_cast<i64>(p)) {
      cells.push_back({v, {p, k}});
      if (v > bound_ / static_cast<i64>(p)) break;
    }
  }
  std::sort(cells.begin(), cells.end());
  for (const auto& [index, pk] : cells) {
    const PrimeLevels& pl = prime_levels(pk.first);
    auto img = pl.E->image(g);
    if (static_cast<std::size_t>(pk.second) >= pl.levels.size()) continue;
    for (const auto& N : pl.levels[static_cast<std::size_t>(pk.second)])
      if (!N.contains(img)) return NilpotentDResult{index, pk.first, pk.second};
  }
  return std::nullopt;
}

std::vector<PQuotientStats> NilpotentOracle::quotient_stats(u64 p) const {
  const PrimeLevels& pl = prime_levels(p);
  const MalcevEnvelope* E = pl.E.get();
  std::vector<PQuotientStats> out;
  for (std::size_t k = 1; k < pl.levels.size(); ++k)
    for (const auto& N : pl.levels[k]) {
      PQuotientStats st;
      st.log_order = static_cast<int>(k);
      // γ_i(E)·N, descending until it equals N.
      PcSubgroup gamma = PcSubgroup::whole(E);
      PcSubgroup prev = gamma;
      int cls = 0;
      for (;;) {
        PcSubgroup withN = gamma;
        for (const auto& x : N.igs()) withN.add(x);
        if (withN.log_order() == N.log_order()) break;
        prev = withN;
        ++cls;
        PcSubgroup nextg(E);
        for (const auto& x : gamma.igs())
          for (const auto& y : E->generators()) nextg.add(E->comm(x, y));
        nextg.close_normal();
        gamma = nextg;
      }
      st.nil_class = cls;
      int explog = 0;
      for (const auto& u : prev.igs()) {
        int s = 0;
        PcSubgroup::Elem x = u;
        while (!N.contains(x)) {
          x = E->pow(x, p);
          ++s;
        }
        explog = std::max(explog, s);
      }
      st.last_gamma_exp_log = explog;
      out.push_back(st);
    }
  return out;
}

}  // namespace rfg
