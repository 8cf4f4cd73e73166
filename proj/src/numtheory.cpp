#include "rfg/numtheory.hpp"

#include <numeric>
#include <stdexcept>

#include "rfg/rational.hpp"

namespace rfg {

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

u64 next_prime(u64 n) {
  u64 k = n + 1;
  while (!is_prime(k)) ++k;
  return k;
}

std::vector<u64> primes_up_to(u64 n) {
  std::vector<u64> out;
  for (u64 k = 2; k <= n; ++k)
    if (is_prime(k)) out.push_back(k);
  return out;
}

u64 mod_pow(u64 base, u64 exp, u64 p) {
  unsigned __int128 r = 1 % p, b = base % p;
  while (exp) {
    if (exp & 1) r = r * b % p;
    b = b * b % p;
    exp >>= 1;
  }
  return static_cast<u64>(r);
}

u64 mod_inv(u64 a, u64 p) {
  i64 t = 0, nt = 1, r = static_cast<i64>(p), nr = static_cast<i64>(a % p);
  while (nr) {
    i64 q = r / nr;
    t -= q * nt;
    std::swap(t, nt);
    r -= q * nr;
    std::swap(r, nr);
  }
  if (r != 1) throw PreconditionError("value not invertible modulo " + std::to_string(p));
  return static_cast<u64>(t < 0 ? t + static_cast<i64>(p) : t);
}

u64 mod_reduce(i64 a, u64 p) {
  i64 r = a % static_cast<i64>(p);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(p) : r);
}

i64 gcd_i64(i64 a, i64 b) { return std::gcd(a, b); }

i64 lcm_i64(i64 a, i64 b) {
  if (a == 0 || b == 0) return 0;
  i64 g = std::gcd(a, b);
  i64 out;
  if (__builtin_mul_overflow(a / g, b, &out)) throw Error("lcm overflow");
  return out < 0 ? -out : out;
}

i64 lcm_upto(int r) {
  i64 l = 1;
  for (int k = 2; k <= r; ++k) l = lcm_i64(l, k);
  return l;
}

u64 multiplicative_order(u64 a, u64 q) {
  if (q == 1) return 1;
  if (std::gcd(a % q, q) != 1) throw PreconditionError("order of a non-unit");
  u64 x = a % q, e = 1;
  while (x != 1) {
    x = static_cast<u64>(static_cast<unsigned __int128>(x) * (a % q) % q);
    ++e;
  }
  return e;
}

int valuation(i64 a, u64 p) {
  if (a == 0) throw PreconditionError("valuation of zero");
  int v = 0;
  while (a % static_cast<i64>(p) == 0) {
    a /= static_cast<i64>(p);
    ++v;
  }
  return v;
}

}  // namespace rfg
