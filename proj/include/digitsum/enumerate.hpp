#pragma once

// Exact counting over n in [1, N] of events on the pair (s_2(n), s_3(n)).
//
// The hot loop walks n in aligned blocks of 3^9. Inside a block the base-3
// digit sum splits as s_3(high) + s_3(low): the high part lives in a
// DigitCounter stepped once per block and the low part is a table lookup.
// s_2(n) is the machine popcount. Every n lands in a histogram of
// d = s_3(n) - s_2(n); the predicate count is derived from the per-block
// histogram, with a per-n fallback for the few blocks where a within-u
// threshold changes.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "digitsum/digit_core.hpp"
#include "digitsum/exact_dist.hpp"
#include "digitsum/exponents.hpp"

namespace digitsum {

inline constexpr int kHistMin = -64;
inline constexpr int kHistMax = 128;
inline constexpr std::size_t kHistSize = kHistMax - kHistMin + 1;
inline constexpr std::uint64_t kMaxLimit = std::uint64_t{1} << 63;
inline constexpr std::uint64_t kDefaultChunk = std::uint64_t{1} << 24;
inline constexpr double kBoundaryProximity = 1e-9;

using Histogram = std::array<std::uint64_t, kHistSize>;

// ---------------------------------------------------------------------------
// Predicates

struct Predicate {
  enum class Kind { equal, within_u, diff_in };

  Kind kind = Kind::equal;
  double u = 0.0;  // within_u
  int a = 0;       // diff_in lower bound (inclusive)
  int b = 0;       // diff_in upper bound (inclusive)

  static Predicate equal() { return {}; }
  static Predicate within(double u) {
    if (!(u >= 0.0) || !std::isfinite(u)) throw std::invalid_argument("within_u: u must be finite and >= 0");
    return {Kind::within_u, u, 0, 0};
  }
  static Predicate diff_in(int a, int b) {
    if (a > b) throw std::invalid_argument("diff_in: need a <= b");
    return {Kind::diff_in, 0.0, a, b};
  }

  const char* name() const {
    switch (kind) {
      case Kind::equal: return "equal";
      case Kind::within_u: return "within_u";
      case Kind::diff_in: return "diff_in";
    }
    return "?";
  }

  /// Reference evaluation on d = s_3(n) - s_2(n). within_u is
  /// |d| <= u ln n, evaluated in double.
  bool operator()(int d, std::uint64_t n) const {
    switch (kind) {
      case Kind::equal: return d == 0;
      case Kind::within_u: return std::abs(d) <= u * std::log(static_cast<double>(n));
      case Kind::diff_in: return a <= d && d <= b;
    }
    return false;
  }

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

// ---------------------------------------------------------------------------
// Results

struct RangeResult {
  std::uint64_t start = 0;
  std::uint64_t end = 0;  // inclusive
  std::uint64_t count = 0;
  /// within_u only: n with | u ln n - |d| | < 1e-9, i.e. where the verdict
  /// rests on the last few bits of the floating-point comparison.
  std::uint64_t near_boundary = 0;
  Histogram histogram{};
};

struct CountReport {
  std::uint64_t limit = 0;
  Predicate predicate;
  std::uint64_t count = 0;
  std::uint64_t near_boundary = 0;
  Histogram histogram{};  // all n in [1, limit], unrestricted
  std::vector<RangeResult> partitions;  // sorted by start; histograms kept
  double wall_time = 0.0;
  bool complete = true;
};

inline void accumulate(Histogram& into, const Histogram& from) {
  for (std::size_t i = 0; i < kHistSize; ++i) into[i] += from[i];
}

inline std::uint64_t histogram_total(const Histogram& h) {
  std::uint64_t s = 0;
  for (auto c : h) s += c;
  return s;
}

inline std::uint64_t histogram_at(const Histogram& h, int d) {
  if (d < kHistMin || d > kHistMax) return 0;
  return h[static_cast<std::size_t>(d - kHistMin)];
}

// ---------------------------------------------------------------------------
// within_u thresholds

namespace detail {

/// Smallest n >= 1 with pred(n) true for a monotone predicate, or nullopt.
template <class P>
std::optional<std::uint64_t> first_true(P&& pred, std::uint64_t lo, std::uint64_t hi) {
  if (!pred(hi)) return std::nullopt;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (pred(mid)) hi = mid; else lo = mid + 1;
  }
  return lo;
}

struct Interval {
  std::uint64_t lo, hi;  // inclusive
};

/// For within_u: threshold[k] = smallest n with k <= u ln n (the same
/// double expression as Predicate::operator()), plus the intervals of n
/// where u ln n is within kBoundaryProximity of an integer k.
struct WithinTable {
  std::array<std::uint64_t, kHistMax + 1> threshold{};
  std::vector<Interval> special;  // sorted, may overlap

  explicit WithinTable(double u) {
    const auto value = [u](std::uint64_t n) { return u * std::log(static_cast<double>(n)); };
    for (int k = 0; k <= kHistMax; ++k) {
      const auto t = first_true([&](std::uint64_t n) { return k <= value(n); }, 1, kMaxLimit);
      threshold[k] = t.value_or(UINT64_MAX);
      if (!t) continue;
      const double kd = k;
      const auto lo = first_true([&](std::uint64_t n) { return value(n) > kd - kBoundaryProximity; }, 1,
                                 kMaxLimit);
      const auto past = first_true([&](std::uint64_t n) { return value(n) >= kd + kBoundaryProximity; },
                                   1, kMaxLimit);
      Interval iv{*t, *t};
      if (lo) {
        iv.lo = std::min(iv.lo, *lo);
        iv.hi = std::max(iv.hi, past ? *past - 1 : kMaxLimit);
      }
      special.push_back(iv);
    }
    std::sort(special.begin(), special.end(), [](auto& x, auto& y) { return x.lo < y.lo; });
  }

  /// Largest k with threshold[k] <= n (-1 if none).
  int allowed(std::uint64_t n) const {
    int k = -1;
    while (k + 1 <= kHistMax && threshold[k + 1] <= n) ++k;
    return k;
  }

  bool touches_special(std::uint64_t lo, std::uint64_t hi) const {
    for (const auto& iv : special) {
      if (iv.lo > hi) break;
      if (iv.hi >= lo) return true;
    }
    return false;
  }

  static bool near(double u, int d, std::uint64_t n) {
    return std::abs(u * std::log(static_cast<double>(n)) - std::abs(d)) < kBoundaryProximity;
  }
};

inline constexpr unsigned kLowDigits = 9;
inline constexpr std::uint32_t kBlock = 19683;  // 3^9

inline const std::array<std::uint8_t, kBlock>& low_digit_sums() {
  static const auto table = [] {
    std::array<std::uint8_t, kBlock> t{};
    for (std::uint32_t i = 0; i < kBlock; ++i) t[i] = static_cast<std::uint8_t>(digit_sum(i, 3));
    return t;
  }();
  return table;
}

// Unreachable for 64-bit n; reaching it means a counter is corrupt.
[[noreturn]] inline void histogram_overflow(long d) {
  std::fprintf(stderr, "digit-sum difference %ld outside histogram support\n", d);
  std::abort();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Range kernels

namespace detail {

inline RangeResult count_range_blocked(std::uint64_t start, std::uint64_t end, const Predicate& pred,
                                       const WithinTable* within) {
  if (start < 1 || end < start) throw std::invalid_argument("count_range: need 1 <= start <= end");
  if (end > kMaxLimit) throw std::invalid_argument("count_range: end exceeds 2^63");
  const auto& low = low_digit_sums();

  RangeResult out;
  out.start = start;
  out.end = end;

  DigitCounter high(3, start / kBlock);
  std::uint64_t block_base = (start / kBlock) * kBlock;
  std::uint32_t lo = static_cast<std::uint32_t>(start - block_base);
  // Four interleaved local histograms keep consecutive increments of the
  // same bin from serializing on one memory location.
  std::array<std::array<std::uint32_t, kHistSize>, 4> local{};

  while (true) {
    const std::uint64_t remaining = end - (block_base + lo);
    const std::uint32_t hi =
        remaining >= kBlock - 1 - lo ? kBlock - 1 : static_cast<std::uint32_t>(lo + remaining);
    const long offset = static_cast<long>(high.digit_sum()) - kHistMin;
    // Range of possible d in this block bounds the histogram indices.
    if (offset + 18 >= static_cast<long>(kHistSize) || offset - 63 < 0) {
      histogram_overflow(offset + kHistMin);
    }
    for (auto& h : local) h.fill(0);
    std::uint32_t i = lo;
    for (; i + 3 <= hi; i += 4) {
      const std::uint64_t n = block_base + i;
      ++local[0][offset + low[i] - __builtin_popcountll(n)];
      ++local[1][offset + low[i + 1] - __builtin_popcountll(n + 1)];
      ++local[2][offset + low[i + 2] - __builtin_popcountll(n + 2)];
      ++local[3][offset + low[i + 3] - __builtin_popcountll(n + 3)];
    }
    for (; i <= hi; ++i) ++local[0][offset + low[i] - __builtin_popcountll(block_base + i)];

    Histogram block{};
    for (std::size_t j = 0; j < kHistSize; ++j) {
      block[j] = std::uint64_t{local[0][j]} + local[1][j] + local[2][j] + local[3][j];
    }
    const std::uint64_t first = block_base + lo;
    const std::uint64_t last = block_base + hi;
    switch (pred.kind) {
      case Predicate::Kind::equal:
        out.count += histogram_at(block, 0);
        break;
      case Predicate::Kind::diff_in:
        for (int d = std::max(pred.a, kHistMin); d <= std::min(pred.b, kHistMax); ++d) {
          out.count += histogram_at(block, d);
        }
        break;
      case Predicate::Kind::within_u:
        if (!within->touches_special(first, last)) {
          const int k = within->allowed(first);
          for (int d = -k; d <= k; ++d) out.count += histogram_at(block, d);
        } else {
          for (std::uint64_t n = first; n <= last; ++n) {
            const int d = static_cast<int>(high.digit_sum() + low[n - block_base]) -
                          __builtin_popcountll(n);
            if (pred(d, n)) ++out.count;
            if (WithinTable::near(pred.u, d, n)) ++out.near_boundary;
          }
        }
        break;
    }
    accumulate(out.histogram, block);

    if (last == end) break;
    block_base += kBlock;
    lo = 0;
    high.increment();
  }
  return out;
}

}  // namespace detail

/// Counts n in [start, end] (inclusive, start >= 1) satisfying the predicate.
inline RangeResult count_range(std::uint64_t start, std::uint64_t end, const Predicate& pred) {
  std::optional<detail::WithinTable> within;
  if (pred.kind == Predicate::Kind::within_u) within.emplace(pred.u);
  return detail::count_range_blocked(start, end, pred, within ? &*within : nullptr);
}

/// Same contract as count_range, stepping a base-2 and a base-3
/// DigitCounter in lockstep and evaluating the predicate per n. Slower;
/// kept as the straightforward reference for the blocked kernel.
inline RangeResult count_range_lockstep(std::uint64_t start, std::uint64_t end, const Predicate& pred) {
  if (start < 1 || end < start) throw std::invalid_argument("count_range: need 1 <= start <= end");
  RangeResult out;
  out.start = start;
  out.end = end;
  DigitCounter c2(2, start), c3(3, start);
  for (std::uint64_t n = start;; ++n) {
    const int d = static_cast<int>(c3.digit_sum()) - static_cast<int>(c2.digit_sum());
    if (d < kHistMin || d > kHistMax) detail::histogram_overflow(d);
    ++out.histogram[static_cast<std::size_t>(d - kHistMin)];
    if (pred(d, n)) ++out.count;
    if (pred.kind == Predicate::Kind::within_u && detail::WithinTable::near(pred.u, d, n)) {
      ++out.near_boundary;
    }
    if (n == end) break;
    c2.increment();
    c3.increment();
  }
  return out;
}

}  // namespace digitsum

#include "digitsum/checkpoint.hpp"

namespace digitsum {

// ---------------------------------------------------------------------------
// Parallel driver

struct ParallelOptions {
  unsigned workers = 1;
  std::uint64_t chunk = kDefaultChunk;
  /// Append completed partitions here and skip those already recorded.
  std::optional<std::string> checkpoint_path;
  /// Stop after computing this many new partitions (simulates an
  /// interrupted run); the report is then marked incomplete.
  std::optional<std::size_t> stop_after;
  /// Called after each partition with (covered, limit); serialized.
  std::function<void(std::uint64_t, std::uint64_t)> progress;
};

namespace detail {

/// Splits the parts of [1, N] not covered by `done` into chunk-aligned
/// pieces (boundaries at 1 + i * chunk).
inline std::vector<Interval> plan_partitions(std::uint64_t N, std::uint64_t chunk,
                                             std::vector<RangeResult> done) {
  std::sort(done.begin(), done.end(), [](auto& x, auto& y) { return x.start < y.start; });
  std::vector<Interval> gaps;
  std::uint64_t cursor = 1;
  for (const auto& r : done) {
    if (r.start > cursor) gaps.push_back({cursor, r.start - 1});
    cursor = std::max(cursor, r.end + 1);
  }
  if (cursor <= N) gaps.push_back({cursor, N});
  std::vector<Interval> parts;
  for (const auto& g : gaps) {
    std::uint64_t s = g.lo;
    while (true) {
      const std::uint64_t index = (s - 1) / chunk;
      const std::uint64_t boundary_end =
          index >= (UINT64_MAX - 1) / chunk ? UINT64_MAX : 1 + (index + 1) * chunk - 1;
      const std::uint64_t e = std::min(g.hi, boundary_end);
      parts.push_back({s, e});
      if (e == g.hi) break;
      s = e + 1;
    }
  }
  return parts;
}

}  // namespace detail

/// Counts n in [1, N] satisfying the predicate. The result does not depend
/// on the worker count, the chunk size or on how often the run was
/// interrupted and resumed from its checkpoint.
inline CountReport count_parallel(std::uint64_t N, const Predicate& pred, const ParallelOptions& opt = {}) {
  if (N < 1 || N > kMaxLimit) throw std::invalid_argument("count_parallel: need 1 <= N <= 2^63");
  if (opt.workers < 1) throw std::invalid_argument("count_parallel: workers must be >= 1");
  if (opt.chunk < 1) throw std::invalid_argument("count_parallel: chunk must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  std::optional<Checkpoint> checkpoint;
  std::vector<RangeResult> results;
  if (opt.checkpoint_path) {
    checkpoint.emplace(*opt.checkpoint_path, JobSignature{N, pred});
    results = checkpoint->completed();
  }
  const auto parts = detail::plan_partitions(N, opt.chunk, results);
  const std::size_t todo = opt.stop_after ? std::min(*opt.stop_after, parts.size()) : parts.size();

  std::uint64_t covered = 0;
  for (const auto& r : results) covered += r.end - r.start + 1;
  std::mutex sink;
  std::optional<detail::WithinTable> within;
  if (pred.kind == Predicate::Kind::within_u) within.emplace(pred.u);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto work = [&] {
    try {
      for (std::size_t i = next++; i < todo; i = next++) {
        auto r = detail::count_range_blocked(parts[i].lo, parts[i].hi, pred, within ? &*within : nullptr);
        std::lock_guard lock(sink);
        if (checkpoint) checkpoint->append(r);
        covered += r.end - r.start + 1;
        results.push_back(std::move(r));
        if (opt.progress) opt.progress(covered, N);
      }
    } catch (...) {
      std::lock_guard lock(sink);
      if (!failure) failure = std::current_exception();
      next = todo;
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(opt.workers, std::max<std::size_t>(todo, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(results.begin(), results.end(), [](auto& x, auto& y) { return x.start < y.start; });
  CountReport rep;
  rep.limit = N;
  rep.predicate = pred;
  for (const auto& r : results) {
    rep.count += r.count;
    rep.near_boundary += r.near_boundary;
    accumulate(rep.histogram, r.histogram);
  }
  rep.complete = todo == parts.size();
  rep.partitions = std::move(results);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Card{n in [2 * 3^(K-1), 3^K) : s_3(n) = H} with H = chain_H_from_K(K),
/// by direct enumeration. Every such n is 2 * 3^(K-1) + m with m < 3^(K-1)
/// and s_3(n) = 2 + s_3(m), so the count must equal
/// multinomial_count(K - 1, H - 2); a mismatch throws std::logic_error.
inline std::uint64_t verify_mino3_smallscale(long K) {
  if (K < 2 || K > 20) throw std::invalid_argument("verify_mino3_smallscale: need 2 <= K <= 20");
  const long H = chain_H_from_K(K);
  std::uint64_t p = 1;
  for (long i = 0; i < K - 1; ++i) p *= 3;
  DigitCounter c(3, 2 * p);
  std::uint64_t found = 0;
  for (std::uint64_t m = 0; m < p; ++m, c.increment()) found += c.digit_sum() == static_cast<unsigned>(H);
  if (BigInt(found) != multinomial_count(static_cast<unsigned>(K - 1), H - 2)) {
    throw std::logic_error("verify_mino3_smallscale: enumeration disagrees with the multinomial count");
  }
  return found;
}

/// Partitions exactly tile [1, limit] in order without overlap.
inline bool partitions_tile(const CountReport& rep) {
  std::uint64_t cursor = 1;
  for (const auto& p : rep.partitions) {
    if (p.start != cursor || p.end < p.start) return false;
    cursor = p.end + 1;
  }
  return cursor == rep.limit + 1;
}

}  // namespace digitsum
