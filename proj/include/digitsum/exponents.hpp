#pragma once

// Entropy exponents for digit-sum tails and concentration, the optimizer
// that recovers the balancing constants for a pair of bases, the integer
// parameter chain (K, H) below a limit N, and exact finite checks of the
// tail inequalities.
//
// Real-valued work is in double with explicit tolerances. Every comparison
// against an exact count goes through big_log() and a fixed margin; results
// inside the margin are reported as indeterminate instead of being forced.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "digitsum/bigint.hpp"
#include "digitsum/exact_dist.hpp"

namespace digitsum {

namespace reference {
// Constants quoted for the (2, 3) pair. lambda is 0.14572049 * ln 4.
inline constexpr double kLambdaOverLog4 = 0.14572049;
inline constexpr double kTailNu = 0.970359230;
inline constexpr double kConcentrationExponent = 0.970359238;
inline constexpr double kSelectedFraction = 0.235001144;
inline constexpr double kThresholdU = 0.1457205;
inline constexpr double kCountExponent = 0.970359;
inline double lambda() { return kLambdaOverLog4 * std::log(4.0); }
}  // namespace reference

inline constexpr double kLogMargin = 1e-9;

// ---------------------------------------------------------------------------
// Exponent functions

/// 1 - ((1-l) ln(1-l) + (1+l) ln(1+l)) / ln 4: the base-4 growth exponent of
/// the number of n < 4^H whose binary digit sum deviates from H by l*H.
inline double binary_tail_exponent(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::domain_error("binary_tail_exponent: lambda must lie in (0, 1)");
  }
  const double a = 1.0 - lambda;
  const double b = 1.0 + lambda;
  return 1.0 - (a * std::log(a) + b * std::log(b)) / std::log(4.0);
}

/// Entropy of the ternary digit frequencies (1 - mu + p2, mu - 2 p2, p2),
/// in units of ln 3.
inline double ternary_term_exponent(double p2, double mu) {
  const double p1 = mu - 2.0 * p2;
  const double p0 = 1.0 - p1 - p2;
  const auto inside = [](double p) { return p > 0.0 && p < 1.0; };
  if (!inside(p0) || !inside(p1) || !inside(p2)) {
    throw std::domain_error("ternary_term_exponent: frequencies outside (0, 1)");
  }
  return -(p0 * std::log(p0) + p1 * std::log(p1) + p2 * std::log(p2)) / std::log(3.0);
}

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// Stops when the bracket is narrower than tol.
template <class F>
double golden_section_maximize(F&& f, double lo, double hi, double tol = 1e-12,
                               int max_iter = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

struct TermOptimum {
  double p2 = 0.0;
  double exponent = 0.0;
  std::vector<double> fractions;  // (p0, p1, p2)
};

/// Maximizes ternary_term_exponent(p2, mu) over p2.
///
/// The maximum is flat, so golden section alone only pins p2 to about
/// sqrt(machine eps). A few Newton steps on the stationarity condition
/// 2 ln p1 - ln p0 - ln p2 = 0 (i.e. p1^2 = p0 p2) finish the job.
inline TermOptimum optimize_term(double mu, double tol = 1e-12) {
  if (!(mu > 0.0 && mu < 2.0)) throw std::domain_error("optimize_term: mu must lie in (0, 2)");
  // Feasible p2: p1 = mu - 2 p2 in (0,1) and p0 = 1 - mu + p2 in (0,1).
  const double lo = std::max({0.0, (mu - 1.0) / 2.0, mu - 1.0});
  const double hi = std::min({1.0, mu / 2.0, mu});
  const double width = hi - lo;
  const double pad = width * 1e-9;
  double p2 = golden_section_maximize([mu](double x) { return ternary_term_exponent(x, mu); },
                                      lo + pad, hi - pad, tol);
  for (int it = 0; it < 8; ++it) {
    const double p1 = mu - 2.0 * p2;
    const double p0 = 1.0 - p1 - p2;
    const double g = 2.0 * std::log(p1) - std::log(p0) - std::log(p2);
    const double dg = -4.0 / p1 - 1.0 / p0 - 1.0 / p2;
    double next = p2 - g / dg;
    next = std::clamp(next, lo + pad, hi - pad);
    const double step = std::abs(next - p2);
    p2 = next;
    if (step <= 1e-17) break;
  }
  const double p1 = mu - 2.0 * p2;
  const double p0 = 1.0 - p1 - p2;
  return TermOptimum{p2, ternary_term_exponent(p2, mu), {p0, p1, p2}};
}

struct FrequencyProfile {
  std::vector<double> fractions;  // p_0 .. p_{q-1}
  double exponent = 0.0;          // entropy / ln q
};

/// Maximum-entropy digit frequencies on {0, ..., q-1} with mean `mean`.
/// The maximizer is geometric, p_i proportional to r^i; r is found by
/// bisection on ln r (the mean is increasing in r).
inline FrequencyProfile geometric_frequencies(unsigned q, double mean) {
  require_base(q);
  const double top = static_cast<double>(q - 1);
  if (!(mean > 0.0 && mean < top)) {
    throw std::domain_error("geometric_frequencies: mean must lie in (0, q-1)");
  }
  auto weights = [q](double t) {
    std::vector<double> w(q);
    const double shift = t > 0 ? t * (q - 1) : 0.0;
    double z = 0.0;
    for (unsigned i = 0; i < q; ++i) {
      w[i] = std::exp(t * i - shift);
      z += w[i];
    }
    for (auto& x : w) x /= z;
    return w;
  };
  auto mean_of = [&](double t) {
    const auto w = weights(t);
    double m = 0.0;
    for (unsigned i = 0; i < q; ++i) m += i * w[i];
    return m;
  };
  double lo = -60.0, hi = 60.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_of(mid) < mean ? lo : hi) = mid;
  }
  FrequencyProfile out;
  out.fractions = weights(0.5 * (lo + hi));
  double h = 0.0;
  for (double p : out.fractions) {
    if (p > 0.0) h -= p * std::log(p);
  }
  out.exponent = h / std::log(static_cast<double>(q));
  return out;
}

/// Growth exponent (in units of ln q) of the number of base-q strings whose
/// digit sum exceeds its mean (q-1)/2 per digit by the factor (1 + lambda).
/// For q = 2 this is binary_tail_exponent.
inline double tail_exponent(unsigned q, double lambda) {
  if (q == 2) return binary_tail_exponent(lambda);
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::domain_error("tail_exponent: lambda must lie in (0, 1)");
  }
  return geometric_frequencies(q, (1.0 + lambda) * (q - 1) / 2.0).exponent;
}

// ---------------------------------------------------------------------------
// Balancing two bases

struct ExponentProfile {
  unsigned q1 = 2;
  unsigned q2 = 3;
  double mu = 0.0;  // base-q1 mean digit sum per base-q2 digit
  std::vector<double> ell_fractions;
  double concentration_exponent = 0.0;
  double lambda = 0.0;
  double tail_exponent = 0.0;
  double threshold_u = 0.0;
  double mean_gap = 0.0;  // |(q2-1)/(2 ln q2) - (q1-1)/(2 ln q1)|
  bool feasible = true;
};

/// For n around N, s_{q1}(n) has mean (q1-1)/2 * ln N / ln q1. The number of
/// n whose s_{q2} hits that mean grows like N^E (E = concentration
/// exponent); the number of n whose s_{q1} deviates from its mean by the
/// proportion lambda grows like N^{tail_exponent(q1, lambda)}. The balancing
/// lambda equates the two; threshold_u converts lambda * mean into a
/// multiple of ln n.
inline ExponentProfile balance_threshold(unsigned q1, unsigned q2) {
  if (q1 < 2 || q2 <= q1) throw std::invalid_argument("balance_threshold: need 2 <= q1 < q2");
  const double lq1 = std::log(static_cast<double>(q1));
  const double lq2 = std::log(static_cast<double>(q2));
  ExponentProfile p;
  p.q1 = q1;
  p.q2 = q2;
  p.mu = (q1 - 1) / 2.0 * lq2 / lq1;
  p.mean_gap = std::abs((q2 - 1) / (2.0 * lq2) - (q1 - 1) / (2.0 * lq1));
  if (!(p.mu > 0.0 && p.mu < q2 - 1.0)) {
    p.feasible = false;
    return p;
  }
  if (q2 == 3) {
    const auto opt = optimize_term(p.mu);
    p.ell_fractions = opt.fractions;
    p.concentration_exponent = opt.exponent;
  } else {
    const auto geo = geometric_frequencies(q2, p.mu);
    p.ell_fractions = geo.fractions;
    p.concentration_exponent = geo.exponent;
  }
  const double target = p.concentration_exponent;
  if (!(target > 0.0 && target < 1.0)) {
    p.feasible = false;
    return p;
  }
  // tail_exponent decreases from 1 (lambda -> 0) to 0 (lambda -> 1).
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (tail_exponent(q1, mid) > target ? lo : hi) = mid;
  }
  p.lambda = 0.5 * (lo + hi);
  p.tail_exponent = tail_exponent(q1, p.lambda);
  p.threshold_u = p.lambda * (q1 - 1) / (2.0 * lq1);
  return p;
}

// ---------------------------------------------------------------------------
// Parameter chain below N

struct SectionFourParams {
  std::uint64_t N = 0;
  long K = 0;
  long H = 0;
};

namespace detail {
using u128 = unsigned __int128;

inline u128 pow_u128(unsigned base, long exp) {
  u128 r = 1;
  for (long i = 0; i < exp; ++i) r *= base;
  return r;
}

inline unsigned bit_length_u128(u128 v) {
  unsigned n = 0;
  while (v != 0) {
    v >>= 1;
    ++n;
  }
  return n;
}
}  // namespace detail

/// floor((K - 1) ln 3 / ln 4) + 2, with the floor taken as the largest h
/// satisfying 4^h <= 3^(K-1).
inline long chain_H_from_K(long K) {
  if (K < 1) throw std::domain_error("chain_H_from_K: K must be >= 1");
  const BigInt p = big_pow(3, static_cast<unsigned long>(K - 1));
  return static_cast<long>((bit_length(p) - 1) / 2) + 2;
}

/// K = floor(ln N / ln 3) - 2 and H = floor((K-1) ln 3 / ln 4) + 2, both
/// floors computed by integer power comparison.
inline SectionFourParams section4_params(std::uint64_t N) {
  if (N < 81) throw std::domain_error("section4_params: N must be >= 81");
  long e = 0;
  detail::u128 p = 1;
  while (p * 3 <= N) {
    p *= 3;
    ++e;
  }
  SectionFourParams s;
  s.N = N;
  s.K = e - 2;
  s.H = chain_H_from_K(s.K);
  return s;
}

/// N/81 <= 3^(K-1) < 3^K < 4^H <= N, checked in exact integer arithmetic.
inline bool hkn_holds(const SectionFourParams& s) {
  if (s.K < 1 || s.H < 0) return false;
  const auto p3km1 = detail::pow_u128(3, s.K - 1);
  const auto p3k = p3km1 * 3;
  const auto p4h = detail::pow_u128(4, s.H);
  const detail::u128 n = s.N;
  return n <= 81 * p3km1 && p3km1 < p3k && p3k < p4h && p4h <= n;
}

// ---------------------------------------------------------------------------
// Exact verification of the tail inequalities

enum class Verdict { holds, fails, indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

/// Decides lhs <= rhs (upper) or lhs >= rhs (lower) from natural logs.
inline Verdict compare_logs(double log_lhs, double log_rhs, bool upper_bound,
                            double margin = kLogMargin) {
  const double diff = upper_bound ? log_rhs - log_lhs : log_lhs - log_rhs;
  if (diff > margin) return Verdict::holds;
  if (diff < -margin) return Verdict::fails;
  return Verdict::indeterminate;
}

struct TailBoundReport {
  int prop = 3;
  long parameter = 0;   // H for the binary tail, L for the ternary count
  double lambda = 0.0;  // binary tail only
  double exponent = 0.0;
  long target = 0;      // ternary: the digit sum floor(L ln 3 / ln 4)
  BigInt lhs = 0;
  double log_lhs = 0.0;
  double log_rhs = 0.0;
  Verdict verdict = Verdict::indeterminate;
  // Ternary only: the single multinomial term with l2 = floor(fraction * L).
  std::optional<BigInt> selected_term;
  long selected_l2 = 0;
};

/// Card{n < 4^H : |s_2(n) - H| >= lambda H} <= 2^(2 H nu).
inline TailBoundReport verify_prop3(long H, double lambda = reference::lambda(),
                                    double nu = reference::kTailNu) {
  if (H < 1) throw std::domain_error("verify_prop3: H must be >= 1");
  if (!(nu > binary_tail_exponent(lambda))) {
    throw std::domain_error("verify_prop3: nu must exceed binary_tail_exponent(lambda)");
  }
  TailBoundReport r;
  r.prop = 3;
  r.parameter = H;
  r.lambda = lambda;
  r.exponent = nu;
  const auto row = binomial_row(static_cast<unsigned>(2 * H));
  const Rational center(H);
  const Rational radius = rational_from_double(lambda) * Rational(H);
  r.lhs = tail_mass(row, center, radius);
  r.log_lhs = big_log(r.lhs);
  r.log_rhs = 2.0 * static_cast<double>(H) * nu * std::log(2.0);
  r.verdict = r.lhs == 0 ? Verdict::holds : compare_logs(r.log_lhs, r.log_rhs, true);
  return r;
}

/// floor(L ln 3 / ln 4) as the largest m with 4^m <= 3^L.
inline long ternary_target(long L) {
  const BigInt p = big_pow(3, static_cast<unsigned long>(L));
  return static_cast<long>((bit_length(p) - 1) / 2);
}

/// Card{n < 3^L : s_3(n) = floor(L ln 3 / ln 4)} >= 3^(exponent L).
inline TailBoundReport verify_prop4(long L, double exponent = reference::kConcentrationExponent,
                                    double selected_fraction = reference::kSelectedFraction) {
  if (L < 1) throw std::domain_error("verify_prop4: L must be >= 1");
  TailBoundReport r;
  r.prop = 4;
  r.parameter = L;
  r.exponent = exponent;
  r.target = ternary_target(L);
  r.lhs = multinomial_count(static_cast<unsigned>(L), r.target);
  r.log_lhs = big_log(r.lhs);
  r.log_rhs = exponent * static_cast<double>(L) * std::log(3.0);
  r.verdict = compare_logs(r.log_lhs, r.log_rhs, false);
  // l2 = floor(fraction * L), decided exactly on the double's rational value.
  BigInt l2;
  const Rational scaled = rational_from_double(selected_fraction) * Rational(L);
  mpz_fdiv_q(l2.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  r.selected_l2 = l2.get_si();
  const long l1 = r.target - 2 * r.selected_l2;
  const long l0 = L - l1 - r.selected_l2;
  if (l1 >= 0 && l0 >= 0) {
    r.selected_term = multinomial_term(static_cast<unsigned long>(l0), static_cast<unsigned long>(l1),
                                       static_cast<unsigned long>(r.selected_l2));
  }
  return r;
}

struct ThresholdScan {
  int prop = 3;
  long lo = 0;
  long hi = 0;
  /// Smallest x in [lo, hi] such that every parameter in [x, hi] holds;
  /// empty when the inequality fails (or is indeterminate) at hi itself.
  std::optional<long> threshold;
  long holds = 0;
  long fails = 0;
  long indeterminate = 0;
  /// Largest log_lhs - log_rhs (signed so that positive means "violated").
  double worst_log_gap = -std::numeric_limits<double>::infinity();
  double last_log_gap = 0.0;  // gap at hi
};

namespace detail {
template <class Verify>
ThresholdScan run_scan(int prop, long lo, long hi, unsigned threads, Verify&& verify) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("scan: need 1 <= lo <= hi");
  threads = std::max(1u, threads);
  const auto n = static_cast<std::size_t>(hi - lo + 1);
  std::vector<Verdict> verdicts(n);
  std::vector<double> gaps(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto rep = verify(lo + static_cast<long>(i));
      verdicts[i] = rep.verdict;
      gaps[i] = prop == 3 ? rep.log_lhs - rep.log_rhs : rep.log_rhs - rep.log_lhs;
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  ThresholdScan s;
  s.prop = prop;
  s.lo = lo;
  s.hi = hi;
  for (std::size_t i = 0; i < n; ++i) {
    switch (verdicts[i]) {
      case Verdict::holds: ++s.holds; break;
      case Verdict::fails: ++s.fails; break;
      case Verdict::indeterminate: ++s.indeterminate; break;
    }
    s.worst_log_gap = std::max(s.worst_log_gap, gaps[i]);
  }
  s.last_log_gap = gaps[n - 1];
  std::size_t i = n;
  while (i > 0 && verdicts[i - 1] == Verdict::holds) --i;
  if (i < n) s.threshold = lo + static_cast<long>(i);
  return s;
}
}  // namespace detail

inline ThresholdScan scan_prop3(long lo, long hi, double lambda = reference::lambda(),
                                double nu = reference::kTailNu, unsigned threads = 1) {
  return detail::run_scan(3, lo, hi, threads, [&](long H) { return verify_prop3(H, lambda, nu); });
}

inline ThresholdScan scan_prop4(long lo, long hi,
                                double exponent = reference::kConcentrationExponent,
                                unsigned threads = 1) {
  return detail::run_scan(4, lo, hi, threads, [&](long L) { return verify_prop4(L, exponent); });
}

}  // namespace digitsum
