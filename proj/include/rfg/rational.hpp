#pragma once
// Exact rational scalars and localization at a fixed denominator base.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfg {

using Scalar = mpq_class;
using Integer = mpz_class;
using Vec = std::vector<Scalar>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaError : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct BudgetError : Error {
  using Error::Error;
};
struct UnsupportedError : Error {
  using Error::Error;
};
struct VerificationError : Error {
  using Error::Error;
};

// Parses "p/q" or "p". A zero denominator is a schema error.
Scalar parse_rational(const std::string& text);
std::string format_rational(const Scalar& x);

// numerator / base^delta_exponent with base not dividing numerator when the exponent is positive.
struct LocalizedForm {
  Integer numerator;
  unsigned delta_exponent = 0;
};

// Throws PreconditionError if the denominator of x has a prime factor outside base.
LocalizedForm localize(const Scalar& x, const Integer& base);
Scalar delocalize(const LocalizedForm& f, const Integer& base);

// True iff every prime factor of d divides base.
bool divides_power_of(const Integer& d, const Integer& base);

Vec zero_vec(int n);
Vec unit_vec(int n, int i);
bool is_zero(const Vec& v);
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator-(const Vec& a);
Vec scale(const Vec& a, const Scalar& t);
void axpy(Vec& y, const Scalar& t, const Vec& x);  // y += t x

std::size_t hash_scalar(const Scalar& x);
std::size_t hash_combine(std::size_t seed, std::size_t v);

}  // namespace rfg
