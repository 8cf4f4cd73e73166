#include "rfg/separator.hpp"

#include <algorithm>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rfg {

PrimeMode parse_prime_mode(const std::string& s) {
  if (s == "paper") return PrimeMode::Paper;
  if (s == "best_effort") return PrimeMode::BestEffort;
  throw SchemaError("prime mode must be 'paper' or 'best_effort'");
}

std::string to_string(PrimeMode m) { return m == PrimeMode::Paper ? "paper" : "best_effort"; }

namespace {

u64 checked_mul(u64 a, u64 b) {
  u64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("quotient order overflow");
  return r;
}

u64 checked_pow(u64 b, int e) {
  u64 r = 1;
  for (int i = 0; i < e; ++i) r = checked_mul(r, b);
  return r;
}

}  // namespace

u64 prime_floor(const MGroup& G) {
  Integer floor = G.ambient_delta();
  floor = std::max(floor, Integer(G.dim()));
  floor = std::max(floor, Integer(G.lie().nilpotency_class()));
  for (const auto& s : G.lie().structure_constants()) floor = std::max(floor, Integer(2 * abs(s.c.get_num())));
  if (!floor.fits_ulong_p()) throw Error("prime floor too large");
  return floor.get_ui();
}

bool prime_is_admissible(const MGroup& G, u64 p, PrimeMode mode) {
  if (!is_prime(p) || p <= prime_floor(G)) return false;
  if (mode == PrimeMode::Paper)
    for (const auto& a : G.description().actions)
      if (!splits_like_char0(a, p)) return false;
  return true;
}

std::vector<u64> select_prime(const CoordinateForm& cf, const MGroup& G, PrimeMode mode, int count, u64 ceiling) {
  std::vector<u64> out;
  for (u64 p = prime_floor(G) + 1; static_cast<int>(out.size()) < count; ++p) {
    if (p > ceiling) throw Error("no admissible prime below the search ceiling " + std::to_string(ceiling));
    if (!prime_is_admissible(G, p, mode)) continue;
    if (cf.gcd % static_cast<unsigned long>(p) == 0) continue;
    out.push_back(p);
  }
  return out;
}

VecP QuotientData::project(const VecP& v) const {
  VecP r = reduce_against(ideal, v, prime);
  VecP x;
  x.reserve(free_cols.size());
  for (int c : free_cols) x.push_back(r[static_cast<std::size_t>(c)]);
  return x;
}

VecP QuotientData::lift(const VecP& x) const {
  VecP v(static_cast<std::size_t>(dim), 0);
  for (std::size_t i = 0; i < free_cols.size(); ++i) v[static_cast<std::size_t>(free_cols[i])] = x[i];
  return v;
}

QElement QuotientData::identity() const {
  QElement e;
  e.x.assign(free_cols.size(), 0);
  e.a.assign(static_cast<std::size_t>(rank), 0);
  return e;
}

QElement QuotientData::multiply(const QElement& u, const QElement& v) const {
  QElement r;
  if (!free_cols.empty()) {
    VecP y = v.x;
    if (with_finite && u.f != 0) y = induced_finite[static_cast<std::size_t>(u.f)].apply(y);
    for (int j = 0; j < rank; ++j)
      if (u.a[static_cast<std::size_t>(j)]) y = induced_pow[static_cast<std::size_t>(j)][u.a[static_cast<std::size_t>(j)]].apply(y);
    r.x = project(Lp->bch(lift(u.x), lift(y)));
  }
  r.a.resize(static_cast<std::size_t>(rank));
  for (int j = 0; j < rank; ++j) r.a[static_cast<std::size_t>(j)] = (u.a[static_cast<std::size_t>(j)] + v.a[static_cast<std::size_t>(j)]) % exponent;
  r.f = with_finite ? finite_table[static_cast<std::size_t>(u.f)][static_cast<std::size_t>(v.f)] : 0;
  return r;
}

QElement QuotientData::power(const QElement& u, u64 t) const {
  QElement r = identity(), b = u;
  while (t) {
    if (t & 1) r = multiply(r, b);
    t >>= 1;
    if (t) b = multiply(b, b);
  }
  return r;
}

QElement evaluate_hom(const SeparatingQuotient& Q, const GroupElement& g) {
  const QuotientData& d = *Q.data;
  QElement r;
  if (!d.free_cols.empty()) r.x = d.project(reduce_vec_mod_p(g.k, d.prime));
  r.a.resize(static_cast<std::size_t>(d.rank));
  for (int j = 0; j < d.rank; ++j) {
    i64 m = g.h[static_cast<std::size_t>(j)] % static_cast<i64>(d.exponent);
    r.a[static_cast<std::size_t>(j)] = static_cast<u64>(m < 0 ? m + static_cast<i64>(d.exponent) : m);
  }
  r.f = d.with_finite ? g.f : 0;
  return r;
}

nlohmann::json certificate_json(const SeparatingQuotient& Q) {
  nlohmann::json j;
  j["prime"] = Q.prime;
  j["ideal_basis"] = nlohmann::json::array();
  for (const auto& row : Q.ideal.basis) j["ideal_basis"].push_back(row);
  j["codim"] = Q.codim;
  j["exponent"] = Q.exponent;
  j["finite_part_order"] = Q.finite_part_order;
  j["order"] = Q.order;
  j["delta_p"] = Q.delta_p;
  j["checks_passed"] = Q.checks_passed;
  return j;
}

Separator::Separator(const MGroup& G, SeparatorOptions opt) : G_(G), opt_(opt) {}

const Separator::PrimeData& Separator::prime_data(u64 p) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(p);
  if (it != cache_.end()) return *it->second;
  auto pd = std::make_unique<PrimeData>();
  pd->Lp = std::make_shared<const ModPLieRing>(reduce_mod_p(G_.lie(), G_.all_actions(), p, G_.ambient_delta()));
  pd->ideals = invariant_ideals_mod_p(*pd->Lp, opt_.ideal_options);
  pd->delta = delta_mod_p(*pd->Lp, pd->ideals);
  const PrimeData& ref = *pd;
  cache_.emplace(p, std::move(pd));
  return ref;
}

SeparatingQuotient Separator::build_k_quotient(u64 p, const IdealModP& J, int delta_p) const {
  const PrimeData& pd = prime_data(p);
  auto d = std::make_shared<QuotientData>();
  d->prime = p;
  d->dim = G_.dim();
  d->ideal = J.basis;
  d->Lp = pd.Lp;
  d->rank = G_.rank();
  d->with_finite = G_.finite_order() > 1;
  std::vector<int> piv = pivot_columns(J.basis);
  for (int c = 0; c < G_.dim(); ++c)
    if (std::find(piv.begin(), piv.end(), c) == piv.end()) d->free_cols.push_back(c);
  int q = static_cast<int>(d->free_cols.size());

  auto induce = [&](const MatP& A) {
    MatP B(q, p);
    for (int c = 0; c < q; ++c) {
      VecP e(static_cast<std::size_t>(q), 0);
      e[static_cast<std::size_t>(c)] = 1;
      VecP img = d->project(A.apply(d->lift(e)));
      for (int r = 0; r < q; ++r) B(r, c) = img[static_cast<std::size_t>(r)];
    }
    return B;
  };

  SeparatingQuotient Q;
  Q.prime = p;
  Q.ideal = J;
  Q.codim = J.codim;
  Q.delta_p = delta_p;
  u64 e = 1;
  bool all_diag = true;
  bool split_all = true;
  for (int j = 0; j < G_.rank(); ++j) {
    MatP B = induce(pd.Lp->actions[static_cast<std::size_t>(j)]);
    if (q > 0) {
      auto rep = matrix_order_report(B, checked_pow(p, q));
      e = static_cast<u64>(lcm_i64(static_cast<i64>(e), static_cast<i64>(rep.order)));
      all_diag = all_diag && rep.diagonalizable;
      split_all = split_all && rep.splits;
    }
    d->induced.push_back(std::move(B));
  }
  d->exponent = e;
  for (const auto& B : d->induced) {
    std::vector<MatP> pw{MatP::identity(q, p)};
    for (u64 t = 1; t < e; ++t) pw.push_back(pw.back() * B);
    d->induced_pow.push_back(std::move(pw));
  }
  if (d->with_finite) {
    const auto& F = *G_.description().finite_part;
    d->finite_table = F.table;
    d->induced_finite.push_back(MatP::identity(q, p));
    for (int s = 1; s < F.order; ++s)
      d->induced_finite.push_back(induce(pd.Lp->actions[static_cast<std::size_t>(G_.rank() + s - 1)]));
  }
  Q.exponent = e;
  Q.finite_part_order = G_.finite_order();
  Q.order = checked_mul(checked_mul(checked_pow(p, J.codim), checked_pow(e, G_.rank())), static_cast<u64>(Q.finite_part_order));
  Q.induced_actions = d->induced;

  // Size laws for the induced action.
  if (G_.rank() > 0 && q > 0 && split_all) {
    if (((p - 1) * p) % e != 0) throw VerificationError("exponent does not divide (p-1)p");
    Q.checks_passed.push_back("exponent_divides_p_minus_1_times_p");
    if (all_diag) {
      if ((p - 1) % e != 0) throw VerificationError("diagonalizable action with exponent not dividing p-1");
      Q.checks_passed.push_back("exponent_divides_p_minus_1");
    }
  }
  for (const auto& B : d->induced)
    if (!power_mod_p(B, e).is_identity()) throw VerificationError("induced action does not have the stated exponent");
  Q.checks_passed.push_back("induced_action_exponent");
  Q.data = std::move(d);
  return Q;
}

SeparatingQuotient Separator::separate_in_k(const GroupElement& g) const {
  CoordinateForm cf = coordinate_form(g, G_);
  std::vector<u64> primes = select_prime(cf, G_, opt_.mode, opt_.prime_count, opt_.prime_ceiling);
  std::optional<SeparatingQuotient> best;
  for (u64 p : primes) {
    const PrimeData& pd = prime_data(p);
    VecP gbar = reduce_vec_mod_p(g.k, p);
    std::vector<const IdealModP*> cands;
    for (const auto& J : pd.delta.witness_family)
      if (!J.contains(gbar, p)) cands.push_back(&J);
    if (cands.empty()) throw VerificationError("no witness ideal excludes the element mod " + std::to_string(p));
    std::sort(cands.begin(), cands.end(), [](const IdealModP* a, const IdealModP* b) {
      return a->codim != b->codim ? a->codim < b->codim : *a < *b;
    });
    std::string key = "k:" + std::to_string(p);
    for (const auto& row : cands.front()->basis) {
      key += '|';
      for (auto x : row) key += std::to_string(x) + ",";
    }
    const IdealModP& J = *cands.front();
    int dp = pd.delta.delta_p;
    SeparatingQuotient Q = cached(key, [&] { return build_k_quotient(p, J, dp); });
    if (!best || Q.order < best->order) best = std::move(Q);
  }
  return *best;
}

SeparatingQuotient Separator::separate_top(const GroupElement& g) const {
  bool h_nonzero = std::any_of(g.h.begin(), g.h.end(), [](i64 x) { return x != 0; });
  u64 e = 1;
  bool with_finite = false;
  u64 order = 0;
  if (h_nonzero) {
    e = 2;
    while (std::all_of(g.h.begin(), g.h.end(), [&](i64 x) { return x % static_cast<i64>(e) == 0; })) ++e;
    order = checked_pow(e, G_.rank());
  }
  if (g.f != 0 && (order == 0 || static_cast<u64>(G_.finite_order()) < order)) {
    e = 1;
    with_finite = true;
    order = static_cast<u64>(G_.finite_order());
  }
  std::string key = "top:" + std::to_string(e) + ":" + std::to_string(with_finite);
  return cached(key, [&] {
    auto d = std::make_shared<QuotientData>();
    d->dim = G_.dim();
    d->rank = G_.rank();
    d->exponent = e;
    d->with_finite = with_finite;
    if (with_finite) d->finite_table = G_.description().finite_part->table;
    SeparatingQuotient Q;
    Q.exponent = e;
    Q.finite_part_order = with_finite ? G_.finite_order() : 1;
    Q.order = order;
    Q.data = std::move(d);
    return Q;
  });
}

SeparatingQuotient Separator::cached(const std::string& key, const std::function<SeparatingQuotient()>& make) const {
  {
    std::lock_guard<std::mutex> lock(qmu_);
    auto it = qcache_.find(key);
    if (it != qcache_.end()) return it->second;
  }
  SeparatingQuotient Q = make();
  verify_quotient(Q);
  std::lock_guard<std::mutex> lock(qmu_);
  return qcache_.emplace(key, std::move(Q)).first->second;
}

void Separator::verify_quotient(SeparatingQuotient& Q) const {
  const QuotientData& d = *Q.data;
  u64 expect = checked_mul(checked_mul(Q.prime ? checked_pow(Q.prime, Q.codim) : 1, checked_pow(Q.exponent, G_.rank())),
                           static_cast<u64>(Q.finite_part_order));
  if (expect != Q.order) throw VerificationError("quotient order disagrees with p^codim e^n |F|");
  Q.checks_passed.push_back("order_formula");
  if (!(evaluate_hom(Q, G_.identity()) == d.identity())) throw VerificationError("identity does not map to the identity");
  std::vector<GroupElement> gens = G_.generators();
  for (const auto& s : G_.generators()) gens.push_back(G_.invert(s));
  std::vector<QElement> imgs;
  for (const auto& s : gens) imgs.push_back(evaluate_hom(Q, s));
  for (std::size_t a = 0; a < gens.size(); ++a)
    for (std::size_t b = 0; b < gens.size(); ++b)
      if (!(evaluate_hom(Q, G_.multiply(gens[a], gens[b])) == d.multiply(imgs[a], imgs[b])))
        throw VerificationError("evaluation map is not multiplicative on a generator pair");
  Q.checks_passed.push_back("hom_on_generator_pairs");
  for (int j = 0; j < G_.rank(); ++j) {
    GroupElement hj = G_.identity();
    hj.h[static_cast<std::size_t>(j)] = 1;
    QElement c = d.power(evaluate_hom(Q, hj), Q.exponent);
    for (const auto& s : imgs)
      if (!(d.multiply(c, s) == d.multiply(s, c))) throw VerificationError("image of h^e is not central");
  }
  if (G_.rank() > 0) Q.checks_passed.push_back("h_power_central");
}

SeparatingQuotient Separator::separate(const GroupElement& g) const {
  G_.check_conforms(g);
  if (G_.is_identity(g)) throw PreconditionError("cannot separate the identity");
  SeparatingQuotient Q = G_.in_k(g) ? separate_in_k(g) : separate_top(g);
  if (evaluate_hom(Q, g) == Q.data->identity()) throw VerificationError("element maps to the identity");
  Q.checks_passed.push_back("image_nontrivial");
  return Q;
}

SeparatingQuotient separate(const GroupElement& g, const MGroup& G, PrimeMode mode) {
  SeparatorOptions opt;
  opt.mode = mode;
  return Separator(G, opt).separate(g);
}

std::vector<SeparatingQuotient> separate_all(const Separator& S, const Ball& B, const UpperCurveOptions& opt) {
  const long long n = static_cast<long long>(B.elements.size());
  std::vector<SeparatingQuotient> out(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  auto body = [&](long long i) {
    const auto& g = B.elements[static_cast<std::size_t>(i)];
    if (S.group().is_identity(g)) return;
    try {
      out[static_cast<std::size_t>(i)] = S.separate(g);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  if (opt.parallel) {
#ifdef _OPENMP
    int nthreads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
#endif
    for (long long i = 0; i < n; ++i) body(i);
  } else {
    for (long long i = 0; i < n; ++i) body(i);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<UpperCurveRow> upper_bound_curve(const Separator& S, const Ball& B, const UpperCurveOptions& opt) {
  auto qs = separate_all(S, B, opt);
  std::vector<UpperCurveRow> rows;
  UpperCurveRow cur;
  std::size_t idx = 0;
  for (int r = 0; r <= B.radius; ++r) {
    for (; idx < B.size(r); ++idx) {
      const auto& q = qs[idx];
      if (q.order > cur.rf_upper) {
        cur.rf_upper = q.order;
        cur.witness = idx;
        cur.prime = q.prime;
        cur.codim = q.codim;
        cur.exponent = q.exponent;
      }
    }
    cur.r = r;
    rows.push_back(cur);
  }
  return rows;
}

}  // namespace rfg
