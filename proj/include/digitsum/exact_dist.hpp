#pragma once

// Exact digit-sum distributions over [0, b^L): for each m, the number of
// integers n < b^L (written with exactly L digits, leading zeros allowed)
// whose digits sum to m. Everything here is integer-exact; there is no
// floating point in this header.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "digitsum/bigint.hpp"
#include "digitsum/digit_core.hpp"

namespace digitsum {

inline constexpr unsigned kDefaultMaxLength = 5000;

struct ExactDistribution {
  unsigned base = 2;
  unsigned length = 0;
  std::vector<BigInt> counts;  // counts[m] for 0 <= m <= (base - 1) * length

  long max_sum() const { return static_cast<long>(base - 1) * length; }

  BigInt count(long m) const {
    if (m < 0 || m > max_sum()) return 0;
    return counts[static_cast<std::size_t>(m)];
  }

  BigInt total() const {
    BigInt s = 0;
    for (const auto& c : counts) s += c;
    return s;
  }
};

/// Card{0 <= n < 4^H : s_2(n) = m} = C(2H, m). Zero outside 0 <= m <= 2H.
inline BigInt binomial_count(unsigned H, long m) {
  if (H == 0) throw std::invalid_argument("binomial_count: H must be positive");
  if (m < 0 || m > 2L * H) return 0;
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), 2UL * H, static_cast<unsigned long>(m));
  return r;
}

/// L! / (l0! l1! l2!).
inline BigInt multinomial_term(unsigned long l0, unsigned long l1, unsigned long l2) {
  BigInt a, b;
  mpz_bin_uiui(a.get_mpz_t(), l0 + l1 + l2, l2);
  mpz_bin_uiui(b.get_mpz_t(), l0 + l1, l1);
  return a * b;
}

/// Card{0 <= n < 3^L : s_3(n) = m}, summed term by term over the digit
/// multiplicities (l0, l1, l2) with l0 + l1 + l2 = L and l1 + 2*l2 = m.
/// Zero outside 0 <= m <= 2L.
inline BigInt multinomial_count(unsigned L, long m) {
  if (L == 0) throw std::invalid_argument("multinomial_count: L must be positive");
  if (m < 0 || m > 2L * L) return 0;
  const unsigned long um = static_cast<unsigned long>(m);
  unsigned long l2 = um > L ? um - L : 0;
  const unsigned long last = um / 2;
  unsigned long l1 = um - 2 * l2;
  unsigned long l0 = L - l1 - l2;
  BigInt term = multinomial_term(l0, l1, l2);
  BigInt sum = term;
  // Moving one step (l2 + 1, l1 - 2, l0 + 1) multiplies the term by
  // l1 (l1 - 1) / ((l2 + 1)(l0 + 1)); the division is exact.
  while (l2 < last) {
    mpz_mul_ui(term.get_mpz_t(), term.get_mpz_t(), l1 * (l1 - 1));
    mpz_divexact_ui(term.get_mpz_t(), term.get_mpz_t(), (l2 + 1) * (l0 + 1));
    ++l2;
    ++l0;
    l1 -= 2;
    sum += term;
  }
  return sum;
}

/// Full table for base b and L digit positions, by L-fold convolution of the
/// uniform digit indicator (a sliding window sum of width b per row).
inline ExactDistribution distribution(unsigned base, unsigned length,
                                      unsigned max_length = kDefaultMaxLength) {
  require_base(base);
  if (length == 0) throw std::invalid_argument("distribution: length must be positive");
  if (length > max_length) {
    throw std::length_error("distribution: length " + std::to_string(length) +
                            " exceeds maximum " + std::to_string(max_length));
  }
  const std::size_t top = base - 1;
  std::vector<BigInt> row(top + 1, BigInt(1));
  std::vector<BigInt> next;
  for (unsigned len = 2; len <= length; ++len) {
    const std::size_t width = top * len + 1;
    next.assign(width, BigInt(0));
    BigInt window = 0;
    for (std::size_t m = 0; m < width; ++m) {
      if (m < row.size()) window += row[m];
      if (m >= base && m - base < row.size()) window -= row[m - base];
      next[m] = window;
    }
    row.swap(next);
  }
  return ExactDistribution{base, length, std::move(row)};
}

/// Row n of Pascal's triangle as the base-2 distribution over [0, 2^n).
inline ExactDistribution binomial_row(unsigned n) {
  if (n == 0) throw std::invalid_argument("binomial_row: n must be positive");
  std::vector<BigInt> row(n + 1);
  row[0] = 1;
  for (unsigned m = 0; m < n / 2 + 1 && m < n; ++m) {
    BigInt next = row[m];
    mpz_mul_ui(next.get_mpz_t(), next.get_mpz_t(), n - m);
    mpz_divexact_ui(next.get_mpz_t(), next.get_mpz_t(), m + 1);
    row[m + 1] = std::move(next);
  }
  for (unsigned m = n / 2 + 1; m <= n; ++m) row[m] = row[n - m];
  return ExactDistribution{2, n, std::move(row)};
}

/// Sum of counts[m] over all m with |m - center| >= radius, decided exactly.
inline BigInt tail_mass(const ExactDistribution& d, const Rational& center, const Rational& radius) {
  BigInt sum = 0;
  if (radius <= 0) return d.total();
  // |m - c| >= r  <=>  m <= floor(c - r)  or  m >= ceil(c + r)
  BigInt lo = 0, hi = 0;
  const Rational left = center - radius;
  const Rational right = center + radius;
  mpz_fdiv_q(lo.get_mpz_t(), left.get_num_mpz_t(), left.get_den_mpz_t());
  mpz_cdiv_q(hi.get_mpz_t(), right.get_num_mpz_t(), right.get_den_mpz_t());
  const long n = d.max_sum();
  for (long m = 0; m <= n; ++m) {
    if (m <= lo || m >= hi) sum += d.counts[static_cast<std::size_t>(m)];
  }
  return sum;
}

inline bool is_symmetric(const ExactDistribution& d) {
  const std::size_t n = d.counts.size();
  for (std::size_t m = 0; m < n / 2; ++m) {
    if (d.counts[m] != d.counts[n - 1 - m]) return false;
  }
  return true;
}

inline bool is_unimodal(const ExactDistribution& d) {
  std::size_t m = 1;
  const std::size_t n = d.counts.size();
  while (m < n && d.counts[m] >= d.counts[m - 1]) ++m;
  while (m < n && d.counts[m] <= d.counts[m - 1]) ++m;
  return m == n;
}

inline bool is_conserved(const ExactDistribution& d) {
  return d.total() == big_pow(d.base, d.length);
}

}  // namespace digitsum
