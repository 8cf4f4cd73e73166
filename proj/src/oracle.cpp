#include "rfg/oracle.hpp"

#include <algorithm>
#include <tuple>

namespace rfg {

namespace {

bool integral_matrix(const RatMatrix& m) {
  return std::all_of(m.a.begin(), m.a.end(), [](const Scalar& x) { return x.get_den() == 1 && x.get_num().fits_slong_p(); });
}

bool standard_generators(const MGroup& G) {
  if (!G.description().generators) return true;
  const auto& gens = *G.description().generators;
  std::vector<GroupElement> std_gens;
  for (int i = 0; i < G.dim(); ++i) std_gens.push_back(G.from_k(unit_vec(G.dim(), i)));
  for (int j = 0; j < G.rank(); ++j) {
    GroupElement h = G.identity();
    h.h[static_cast<std::size_t>(j)] = 1;
    std_gens.push_back(h);
  }
  return gens == std_gens;
}

std::vector<std::vector<i64>> to_int_matrix(const RatMatrix& m) {
  std::vector<std::vector<i64>> out(static_cast<std::size_t>(m.n), std::vector<i64>(static_cast<std::size_t>(m.n)));
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j).get_num().get_si();
  return out;
}

std::vector<i64> mat_vec(const std::vector<std::vector<i64>>& M, const std::vector<i64>& v) {
  std::vector<i64> out(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    __int128 s = 0;
    for (std::size_t j = 0; j < v.size(); ++j) s += static_cast<__int128>(M[i][j]) * v[j];
    if (s > INT64_MAX || s < INT64_MIN) throw Error("lattice arithmetic overflow");
    out[i] = static_cast<i64>(s);
  }
  return out;
}

i64 floor_div(i64 a, i64 b) {
  i64 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Residue of μ / n^j modulo q (gcd(q, n) = 1).
i64 residue_mod(const Scalar& x, i64 q) {
  Integer qq(static_cast<long>(q));
  Integer num = x.get_num() % qq;
  if (num < 0) num += qq;
  Integer den = x.get_den() % qq;
  u64 inv = mod_inv(den.get_ui(), static_cast<u64>(q) == 1 ? 1 : static_cast<u64>(q));
  return static_cast<i64>(static_cast<unsigned __int128>(num.get_ui()) * inv % static_cast<u64>(q));
}

}  // namespace

std::string to_string(OracleFamily f) {
  switch (f) {
    case OracleFamily::MetabelianLattice: return "metabelian_lattice";
    case OracleFamily::BaumslagSolitar: return "baumslag_solitar";
    case OracleFamily::Nilpotent: return "nilpotent";
    default: return "unsupported";
  }
}

OracleFamily classify(const MGroup& G) {
  if (G.finite_order() != 1) return OracleFamily::Unsupported;
  if (G.rank() == 0) return OracleFamily::Nilpotent;
  if (G.rank() != 1 || !G.lie().is_abelian() || !standard_generators(G)) return OracleFamily::Unsupported;
  const RatMatrix& M = G.description().actions[0];
  if (!integral_matrix(M)) return OracleFamily::Unsupported;
  Scalar det = determinant(M);
  if (det == 1 || det == -1) return G.ambient_delta() == 1 ? OracleFamily::MetabelianLattice : OracleFamily::Unsupported;
  if (G.dim() == 1 && M(0, 0) >= 2 && G.ambient_delta() == M(0, 0).get_num()) return OracleFamily::BaumslagSolitar;
  return OracleFamily::Unsupported;
}

bool lattice_contains(const std::vector<std::vector<i64>>& H, const std::vector<i64>& x) {
  auto r = lattice_reduce(H, x);
  return std::all_of(r.begin(), r.end(), [](i64 v) { return v == 0; });
}

std::vector<i64> lattice_reduce(const std::vector<std::vector<i64>>& H, std::vector<i64> x) {
  for (std::size_t i = 0; i < H.size(); ++i) {
    i64 q = floor_div(x[i], H[i][i]);
    if (q == 0) continue;
    for (std::size_t j = i; j < x.size(); ++j) x[j] -= q * H[i][j];
  }
  return x;
}

std::vector<std::vector<std::vector<i64>>> hnf_lattices(int m, i64 d) {
  std::vector<std::vector<std::vector<i64>>> out;
  std::vector<i64> diag(static_cast<std::size_t>(m), 1);
  // Diagonals with product d, then free entries 0 <= H[i][j] < H[j][j] above the diagonal.
  std::function<void(int, i64)> pick = [&](int i, i64 rest) {
    if (i == m - 1) {
      diag[static_cast<std::size_t>(i)] = rest;
      std::vector<std::pair<int, int>> free;
      for (int r = 0; r < m; ++r)
        for (int c = r + 1; c < m; ++c) free.emplace_back(r, c);
      std::vector<i64> digits(free.size(), 0);
      for (;;) {
        std::vector<std::vector<i64>> H(static_cast<std::size_t>(m), std::vector<i64>(static_cast<std::size_t>(m), 0));
        for (int r = 0; r < m; ++r) H[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)] = diag[static_cast<std::size_t>(r)];
        for (std::size_t f = 0; f < free.size(); ++f)
          H[static_cast<std::size_t>(free[f].first)][static_cast<std::size_t>(free[f].second)] = digits[f];
        out.push_back(std::move(H));
        std::size_t f = 0;
        for (; f < free.size(); ++f) {
          if (++digits[f] < diag[static_cast<std::size_t>(free[f].second)]) break;
          digits[f] = 0;
        }
        if (f == free.size()) break;
      }
      return;
    }
    for (i64 a = 1; a <= rest; ++a)
      if (rest % a == 0) {
        diag[static_cast<std::size_t>(i)] = a;
        pick(i + 1, rest / a);
      }
  };
  pick(0, d);
  return out;
}

bool NormalSubgroupCertificate::contains(const GroupElement& g) const {
  i64 k = g.h.empty() ? 0 : g.h[0];
  if (k % ell != 0) return false;
  i64 t = k / ell;
  if (modulus > 0) {
    i64 a = residue_mod(g.k[0], modulus);
    i64 want = static_cast<i64>((static_cast<__int128>(t % modulus + modulus) % modulus * shift[0]) % modulus);
    return a == want;
  }
  std::vector<i64> x(g.k.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (g.k[i].get_den() != 1 || !g.k[i].get_num().fits_slong_p()) throw PreconditionError("non-integral lattice element");
    x[i] = g.k[i].get_num().get_si() - t * shift[i];
  }
  return lattice_contains(lattice, x);
}

nlohmann::json NormalSubgroupCertificate::to_json() const {
  nlohmann::json j;
  if (modulus > 0) {
    j["modulus"] = modulus;
    j["base"] = base;
  } else {
    j["lattice"] = lattice;
  }
  j["ell"] = ell;
  j["shift"] = shift;
  j["index"] = index;
  return j;
}

std::vector<NormalSubgroupCertificate> enumerate_normal_subgroups(const MGroup& G, i64 B) {
  OracleFamily fam = classify(G);
  std::vector<NormalSubgroupCertificate> out;
  if (fam == OracleFamily::BaumslagSolitar) {
    i64 n = G.description().actions[0](0, 0).get_num().get_si();
    for (i64 q = 1; q <= B; ++q) {
      if (std::gcd(q, n) != 1) continue;
      i64 o = static_cast<i64>(multiplicative_order(static_cast<u64>(n), static_cast<u64>(q)));
      for (i64 ell = o; q * ell <= B; ell += o)
        for (i64 v = 0; v < q; ++v) {
          if (((n - 1) % q * v) % q != 0) continue;
          NormalSubgroupCertificate c;
          c.modulus = q;
          c.base = n;
          c.ell = ell;
          c.shift = {v};
          c.index = q * ell;
          out.push_back(std::move(c));
        }
    }
  } else if (fam == OracleFamily::MetabelianLattice) {
    int m = G.dim();
    auto M = to_int_matrix(G.description().actions[0]);
    for (i64 d = 1; d <= B; ++d)
      for (auto& H : hnf_lattices(m, d)) {
        bool invariant = true;
        for (const auto& row : H) invariant = invariant && lattice_contains(H, mat_vec(M, row));
        if (!invariant) continue;
        // Order of M on Z^m/Λ, searched up to B/d.
        i64 order = 0;
        std::vector<std::vector<i64>> P(static_cast<std::size_t>(m), std::vector<i64>(static_cast<std::size_t>(m), 0));
        for (int i = 0; i < m; ++i) P[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
        for (i64 t = 1; t * d <= B; ++t) {
          std::vector<std::vector<i64>> Q(static_cast<std::size_t>(m));
          for (int c = 0; c < m; ++c) {
            std::vector<i64> col(static_cast<std::size_t>(m));
            for (int r = 0; r < m; ++r) col[static_cast<std::size_t>(r)] = P[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            col = lattice_reduce(H, mat_vec(M, col));
            for (int r = 0; r < m; ++r) Q[static_cast<std::size_t>(r)].push_back(col[static_cast<std::size_t>(r)]);
          }
          P = Q;
          bool ident = true;
          for (int c = 0; c < m && ident; ++c) {
            std::vector<i64> col(static_cast<std::size_t>(m));
            for (int r = 0; r < m; ++r) col[static_cast<std::size_t>(r)] = P[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            col[static_cast<std::size_t>(c)] -= 1;
            ident = lattice_contains(H, col);
          }
          if (ident) {
            order = t;
            break;
          }
        }
        if (order == 0) continue;
        // Coset representatives 0 <= v_i < H[i][i].
        std::vector<i64> v(static_cast<std::size_t>(m), 0);
        std::vector<std::vector<i64>> shifts;
        for (;;) {
          std::vector<i64> w = mat_vec(M, v);
          for (int i = 0; i < m; ++i) w[static_cast<std::size_t>(i)] -= v[static_cast<std::size_t>(i)];
          if (lattice_contains(H, w)) shifts.push_back(v);
          int i = m - 1;
          for (; i >= 0; --i) {
            if (++v[static_cast<std::size_t>(i)] < H[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]) break;
            v[static_cast<std::size_t>(i)] = 0;
          }
          if (i < 0) break;
        }
        for (i64 ell = order; d * ell <= B; ell += order)
          for (const auto& s : shifts) {
            NormalSubgroupCertificate c;
            c.lattice = H;
            c.ell = ell;
            c.shift = s;
            c.index = d * ell;
            out.push_back(c);
          }
      }
  } else {
    throw UnsupportedError("normal subgroup certificates need a metabelian lattice or BS(1,n) group");
  }
  std::stable_sort(out.begin(), out.end(), [](const NormalSubgroupCertificate& a, const NormalSubgroupCertificate& b) {
    return std::tie(a.index, a.ell, a.modulus, a.lattice, a.shift) < std::tie(b.index, b.ell, b.modulus, b.lattice, b.shift);
  });
  return out;
}

DivisibilityOracle::DivisibilityOracle(const MGroup& G, i64 bound) : G_(G), bound_(bound), family_(classify(G)) {
  if (bound < 2) throw PreconditionError("oracle bound must be at least 2");
  switch (family_) {
    case OracleFamily::MetabelianLattice:
    case OracleFamily::BaumslagSolitar: certs_ = enumerate_normal_subgroups(G, bound); break;
    case OracleFamily::Nilpotent: nil_ = std::make_unique<NilpotentOracle>(G, bound); break;
    default: throw UnsupportedError("group '" + G.name() + "' is outside the oracle families");
  }
}

DivisibilityResult DivisibilityOracle::divisibility(const GroupElement& g) const {
  G_.check_conforms(g);
  if (G_.is_identity(g)) throw PreconditionError("divisibility of the identity");
  DivisibilityResult res;
  if (nil_) {
    if (auto r = nil_->divisibility(g)) {
      res.value = r->value;
      res.prime = r->prime;
      res.level = r->level;
    }
    return res;
  }
  for (const auto& c : certs_)
    if (!c.contains(g)) {
      res.value = c.index;
      res.certificate = c;
      return res;
    }
  return res;
}

DivisibilityResult divisibility(const MGroup& G, const GroupElement& g, i64 B) {
  return DivisibilityOracle(G, B).divisibility(g);
}

}  // namespace rfg
