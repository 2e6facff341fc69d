#pragma once

// Empirical checks of the Gaussian behaviour of s_b(n): the per-n model
// mean and variance, the fraction of n < x inside a y-standard-deviation
// window, and the density of n whose s_3 - s_2 stays within psi sqrt(ln n)
// of its drift (1/ln 3 - 1/ln 4) ln n.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "digitsum/digit_core.hpp"

namespace digitsum {

/// Gaussian model for s_b(n), n around N: mean (b-1) ln N / (2 ln b) and
/// variance (b^2-1) ln N / (12 ln b).
struct GaussianModel {
  unsigned base = 2;
  double N = 2;
  double mean = 0.0;
  double variance = 0.0;

  GaussianModel(unsigned b, double n) : base(b), N(n) {
    require_base(b);
    if (!(n >= 1.0)) throw std::domain_error("GaussianModel: N must be >= 1");
    const double lb = std::log(static_cast<double>(b));
    const double ln = std::log(n);
    mean = (b - 1.0) * ln / (2.0 * lb);
    variance = (static_cast<double>(b) * b - 1.0) * ln / (12.0 * lb);
  }
};

/// P(|Z| <= y) for standard normal Z, i.e. erf(y / sqrt 2). glibc's erf is
/// accurate to about one ulp, well inside 1e-10.
inline double gaussian_window(double y) {
  if (!(y >= 0.0)) throw std::domain_error("gaussian_window: y must be >= 0");
  return std::erf(y / std::sqrt(2.0));
}

/// Fractions (1/x) Card{n < x : |s_b(n) - E_n| < y sqrt(V_n)} for each y,
/// with E_n, V_n the model at N = n. n = 0 never qualifies (ln 0 is
/// undefined) and neither does n = 1 (zero-width window).
inline std::vector<double> empirical_clt(std::uint64_t x, unsigned base, std::span<const double> ys) {
  if (x < 2) throw std::domain_error("empirical_clt: x must be >= 2");
  for (double y : ys) {
    if (!(y > 0.0)) throw std::domain_error("empirical_clt: y must be positive");
  }
  const double lb = std::log(static_cast<double>(base));
  const double mean_coef = (base - 1.0) / (2.0 * lb);
  const double var_coef = (static_cast<double>(base) * base - 1.0) / (12.0 * lb);
  std::vector<std::uint64_t> hits(ys.size(), 0);
  DigitCounter c(base, 2);
  for (std::uint64_t n = 2; n < x; ++n, c.increment()) {
    const double ln = std::log(static_cast<double>(n));
    const double dev = std::abs(c.digit_sum() - mean_coef * ln);
    const double sd = std::sqrt(var_coef * ln);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (dev < ys[i] * sd) ++hits[i];
    }
  }
  std::vector<double> out(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) out[i] = static_cast<double>(hits[i]) / static_cast<double>(x);
  return out;
}

inline double empirical_clt(std::uint64_t x, unsigned base, double y) {
  const double ys[] = {y};
  return empirical_clt(x, base, ys)[0];
}

/// (1/ln 3 - 1/ln 4), the drift of s_3(n) - s_2(n) per unit of ln n.
inline double drift_coefficient() { return 1.0 / std::log(3.0) - 1.0 / std::log(4.0); }

/// Fraction of n < x (counted over 1 <= n < x, divided by x) with
/// |s_3(n) - s_2(n) - c ln n| <= psi sqrt(ln n), c = drift_coefficient().
inline double theorem1_density(std::uint64_t x, double psi) {
  if (x < 2) throw std::domain_error("theorem1_density: x must be >= 2");
  if (!(psi >= 0.0)) throw std::domain_error("theorem1_density: psi must be >= 0");
  const double c = drift_coefficient();
  std::uint64_t hits = 0;
  DigitCounter c2(2, 1), c3(3, 1);
  for (std::uint64_t n = 1; n < x; ++n, c2.increment(), c3.increment()) {
    const double ln = std::log(static_cast<double>(n));
    const double d = static_cast<double>(c3.digit_sum()) - static_cast<double>(c2.digit_sum());
    const double center = c * ln;
    const double half = psi * std::sqrt(ln);
    if (center - half <= d && d <= center + half) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(x);
}

}  // namespace digitsum
