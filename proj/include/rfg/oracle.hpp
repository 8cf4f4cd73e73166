#pragma once
// Exact divisibility function D_G(g) for metabelian lattice groups, BS(1,n) and nilpotent groups.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfg/mgroup.hpp"
#include "rfg/pgroup.hpp"

namespace rfg {

enum class OracleFamily { MetabelianLattice, BaumslagSolitar, Nilpotent, Unsupported };
OracleFamily classify(const MGroup& G);
std::string to_string(OracleFamily f);

// N = <Λ × {0}, (v, ℓ)> in A ⋊ Z. For A = Z^m the lattice is in row Hermite normal form
// (upper triangular, 0 <= H[i][j] < H[j][j] for j > i); for A = Z[1/n] it is qZ[1/n].
struct NormalSubgroupCertificate {
  std::vector<std::vector<i64>> lattice;  // empty for the Z[1/n] case
  i64 modulus = 0;                        // q for the Z[1/n] case
  i64 base = 0;                           // n for the Z[1/n] case
  i64 ell = 1;
  std::vector<i64> shift;
  i64 index = 1;

  bool contains(const GroupElement& g) const;
  nlohmann::json to_json() const;
};

// Integer-lattice helpers (row HNF).
bool lattice_contains(const std::vector<std::vector<i64>>& H, const std::vector<i64>& x);
std::vector<i64> lattice_reduce(const std::vector<std::vector<i64>>& H, std::vector<i64> x);
// All row-HNF sublattices of Z^m with index d.
std::vector<std::vector<std::vector<i64>>> hnf_lattices(int m, i64 d);

// Every certificate of index <= B exactly once, sorted by (index, ℓ, lattice, shift).
std::vector<NormalSubgroupCertificate> enumerate_normal_subgroups(const MGroup& G, i64 B);

struct DivisibilityResult {
  std::optional<i64> value;  // nullopt: exceeds the bound
  std::optional<NormalSubgroupCertificate> certificate;
  u64 prime = 0;  // nilpotent family: p-group quotient of order p^level
  int level = 0;
};

class DivisibilityOracle {
 public:
  // Throws UnsupportedError for groups outside the supported families.
  DivisibilityOracle(const MGroup& G, i64 bound);

  const MGroup& group() const { return G_; }
  OracleFamily family() const { return family_; }
  i64 bound() const { return bound_; }
  DivisibilityResult divisibility(const GroupElement& g) const;
  const std::vector<NormalSubgroupCertificate>& certificates() const { return certs_; }
  const NilpotentOracle* nilpotent() const { return nil_.get(); }

 private:
  const MGroup& G_;
  i64 bound_;
  OracleFamily family_;
  std::vector<NormalSubgroupCertificate> certs_;
  std::unique_ptr<NilpotentOracle> nil_;
};

DivisibilityResult divisibility(const MGroup& G, const GroupElement& g, i64 B);

}  // namespace rfg
