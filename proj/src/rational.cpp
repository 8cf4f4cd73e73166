#include "rfg/rational.hpp"

#include <cctype>

namespace rfg {

namespace {

bool is_integer_text(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

Integer parse_int(const std::string& s) {
  if (!is_integer_text(s)) throw SchemaError("malformed rational: '" + s + "'");
  return Integer(s[0] == '+' ? s.substr(1) : s, 10);
}

}  // namespace

Scalar parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return Scalar(parse_int(text));
  Integer num = parse_int(text.substr(0, slash));
  Integer den = parse_int(text.substr(slash + 1));
  if (den == 0) throw SchemaError("zero denominator in rational '" + text + "'");
  Scalar q(num, den);
  q.canonicalize();
  return q;
}

std::string format_rational(const Scalar& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

bool divides_power_of(const Integer& d, const Integer& base) {
  Integer rest = abs(d);
  while (rest != 1) {
    Integer g = gcd(rest, base);
    if (g == 1) return false;
    rest /= g;
  }
  return true;
}

LocalizedForm localize(const Scalar& x, const Integer& base) {
  LocalizedForm out;
  if (x.get_den() == 1) {
    out.numerator = x.get_num();
    return out;
  }
  if (base <= 1 || !divides_power_of(x.get_den(), base))
    throw PreconditionError("denominator " + x.get_den().get_str() +
                            " is not a power-divisor of " + base.get_str());
  Integer den = x.get_den();
  Integer power = 1;
  while (den != 1) {
    den /= gcd(den, base);
    power *= base;
    ++out.delta_exponent;
  }
  Scalar scaled = x * Scalar(power);
  out.numerator = scaled.get_num();
  return out;
}

Scalar delocalize(const LocalizedForm& f, const Integer& base) {
  Integer power;
  mpz_pow_ui(power.get_mpz_t(), base.get_mpz_t(), f.delta_exponent);
  Scalar q(f.numerator, power);
  q.canonicalize();
  return q;
}

Vec zero_vec(int n) { return Vec(static_cast<std::size_t>(n), Scalar(0)); }

Vec unit_vec(int n, int i) {
  Vec v = zero_vec(n);
  v[static_cast<std::size_t>(i)] = 1;
  return v;
}

bool is_zero(const Vec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

Vec operator+(const Vec& a, const Vec& b) {
  Vec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

Vec operator-(const Vec& a, const Vec& b) {
  Vec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

Vec operator-(const Vec& a) {
  Vec r(a);
  for (auto& x : r) x = -x;
  return r;
}

Vec scale(const Vec& a, const Scalar& t) {
  Vec r(a);
  for (auto& x : r) x *= t;
  return r;
}

void axpy(Vec& y, const Scalar& t, const Vec& x) {
  if (t == 0) return;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (x[i] != 0) y[i] += t * x[i];
}

std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_scalar(const Scalar& x) {
  auto limbs = [](const mpz_t z) {
    std::size_t h = static_cast<std::size_t>(mpz_sgn(z) + 2);
    std::size_t n = mpz_size(z);
    for (std::size_t i = 0; i < n; ++i) h = hash_combine(h, mpz_getlimbn(z, static_cast<mp_size_t>(i)));
    return h;
  };
  return hash_combine(limbs(x.get_num_mpz_t()), limbs(x.get_den_mpz_t()));
}

}  // namespace rfg
