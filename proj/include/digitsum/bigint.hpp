#pragma once

// Arbitrary-precision integer and rational types used by the exact counting
// code, plus the few conversions the rest of the library needs.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace digitsum {

using BigInt = mpz_class;
using Rational = mpq_class;

inline BigInt big_from_u64(std::uint64_t v) {
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return r;
}

inline BigInt big_pow(unsigned long base, unsigned long exp) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

inline std::size_t bit_length(const BigInt& v) {
  return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

/// Natural logarithm of a positive big integer. Absolute error is below
/// 1e-15 * log2(v), i.e. about 1e-11 for 10^4-bit values. Returns -inf for 0.
inline double big_log(const BigInt& v) {
  if (v <= 0) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

/// Exact rational value of a finite double (every double is a dyadic rational).
inline Rational rational_from_double(double x) {
  Rational r(x);
  r.canonicalize();
  return r;
}

inline std::string to_string(const BigInt& v) { return v.get_str(); }

}  // namespace digitsum
