#pragma once
// Finite p-group quotients K/Γ(p^a) of a torsion-free nilpotent group in Mal'cev coordinates,
// with induced polycyclic generating sequences and normal-subgroup descent.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "rfg/mgroup.hpp"

namespace rfg {

// Exact rational with machine-word parts; throws Error on overflow.
struct SmallRat {
  i64 n = 0, d = 1;
  SmallRat() = default;
  SmallRat(long v) : n(v) {}  // NOLINT: implicit from integers like mpq_class
  SmallRat(i64 num, i64 den);
  friend SmallRat operator+(const SmallRat& a, const SmallRat& b);
  friend SmallRat operator-(const SmallRat& a, const SmallRat& b);
  friend SmallRat operator*(const SmallRat& a, const SmallRat& b);
  friend SmallRat operator/(const SmallRat& a, const SmallRat& b);
  SmallRat& operator+=(const SmallRat& b) { return *this = *this + b; }
  bool operator==(const SmallRat& o) const { return n == o.n && d == o.d; }
  bool operator==(long v) const { return d == 1 && n == v; }
};

// E = K / Γ(q), q = p^a, where Γ(q) holds the elements whose Mal'cev coordinates are divisible by q.
// The pcgs is ordered by (p-adic level, coordinate).
class MalcevEnvelope {
 public:
  using Elem = std::vector<std::uint32_t>;

  MalcevEnvelope(const MGroup& G, u64 p, int a);

  u64 prime() const { return p_; }
  u64 modulus() const { return q_; }
  int exponent() const { return a_; }
  int dim() const { return m_; }
  int length() const { return a_ * m_; }

  Elem identity() const { return Elem(static_cast<std::size_t>(m_), 0); }
  Elem mul(const Elem& x, const Elem& y) const;
  Elem inv(const Elem& x) const;
  Elem pow(const Elem& x, u64 e) const;
  Elem comm(const Elem& x, const Elem& y) const;  // x^-1 y^-1 x y
  Elem image(const GroupElement& g) const;
  const std::vector<Elem>& generators() const { return gens_; }

  int depth(const Elem& x) const;  // length() for the identity
  std::uint32_t lead(const Elem& x, int t) const;
  Elem pcgs(int t) const;

 private:
  std::vector<SmallRat> to_log(const Elem& z) const;
  Elem from_log(const std::vector<SmallRat>& x) const;

  const MGroup& G_;
  u64 p_, q_;
  int a_, m_, c_;
  BracketTable<SmallRat> table_;
  std::vector<Elem> gens_;
};

// Exact Mal'cev coordinates of a K-element for an adapted basis (second kind, u_i = exp(v_i)).
Vec malcev_coordinates(const LieRing& L, const Vec& log_coords);
Vec log_from_malcev(const LieRing& L, const Vec& z);

// Subgroup of an envelope given by an induced generating sequence indexed by depth.
class PcSubgroup {
 public:
  using Elem = MalcevEnvelope::Elem;

  explicit PcSubgroup(const MalcevEnvelope* E);
  static PcSubgroup whole(const MalcevEnvelope* E);

  Elem sift(Elem x) const;
  bool contains(const Elem& x) const;
  void add(const Elem& x);  // adds x and closes under the group operations
  void close_normal();      // closes under conjugation by the envelope generators
  int log_order() const;    // log_p |subgroup|
  std::vector<int> depths() const;
  std::vector<Elem> igs() const;
  std::vector<std::uint32_t> key() const;  // canonical; equal iff the subgroups are equal

 private:
  void insert(Elem x, std::vector<Elem>& queue);

  const MalcevEnvelope* E_;
  std::vector<std::optional<Elem>> gen_;
  std::vector<std::vector<Elem>> powers_;  // powers_[t][c] = gen_t^c
};

struct PQuotientStats {
  int log_order = 0;           // |P| = p^log_order
  int nil_class = 0;
  int last_gamma_exp_log = 0;  // exponent of γ_class(P) is p^this
};

struct NilpotentDResult {
  i64 value = 0;
  u64 prime = 0;
  int level = 0;
};

class NilpotentOracle {
 public:
  // Throws UnsupportedError unless G is a torsion-free nilpotent group generated by elements
  // whose Mal'cev coordinates span the integer lattice.
  NilpotentOracle(const MGroup& G, i64 bound, int envelope_override = 0);

  // nullopt: every normal subgroup of index ≤ bound contains g.
  std::optional<NilpotentDResult> divisibility(const GroupElement& g) const;

  struct PrimeLevels {
    std::unique_ptr<MalcevEnvelope> E;
    std::vector<std::vector<PcSubgroup>> levels;  // levels[k] = normal subgroups of index p^k
  };
  const PrimeLevels& prime_levels(u64 p) const;
  int envelope_exponent(u64 p) const;
  std::vector<PQuotientStats> quotient_stats(u64 p) const;

 private:
  const MGroup& G_;
  i64 bound_;
  int override_;
  mutable std::mutex mu_;
  mutable std::map<u64, std::unique_ptr<PrimeLevels>> cache_;
};

}  // namespace rfg
