#pragma once
// Small-integer number theory helpers.

#include <cstdint>
#include <vector>

namespace rfg {

using u64 = std::uint64_t;
using i64 = std::int64_t;

bool is_prime(u64 n);
u64 next_prime(u64 n);  // least prime > n
std::vector<u64> primes_up_to(u64 n);
u64 mod_pow(u64 base, u64 exp, u64 p);
u64 mod_inv(u64 a, u64 p);  // p prime, a not divisible by p
u64 mod_reduce(i64 a, u64 p);
i64 gcd_i64(i64 a, i64 b);
i64 lcm_i64(i64 a, i64 b);  // throws on overflow
i64 lcm_upto(int r);        // lcm(1..r)
// Multiplicative order of a modulo q (gcd(a,q)=1, q>=1).
u64 multiplicative_order(u64 a, u64 q);
// p-adic valuation of a nonzero integer.
int valuation(i64 a, u64 p);

}  // namespace rfg
