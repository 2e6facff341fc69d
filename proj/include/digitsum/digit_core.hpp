#pragma once

// Digit sums in an arbitrary base and an incremental mixed-radix counter
// ("odometer") that keeps the digit vector and its sum up to date with
// amortized O(1) work per increment.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace digitsum {

inline void require_base(unsigned base) {
  if (base < 2) {
    throw std::invalid_argument("base must be >= 2, got " + std::to_string(base));
  }
}

/// Sum of the base-`base` digits of n. digit_sum(0, b) == 0.
inline unsigned digit_sum(std::uint64_t n, unsigned base) {
  require_base(base);
  if (base == 2) return static_cast<unsigned>(__builtin_popcountll(n));
  unsigned s = 0;
  while (n != 0) {
    s += static_cast<unsigned>(n % base);
    n /= base;
  }
  return s;
}

/// Odometer over the base-`base` representation of a 64-bit value.
///
/// Digits are stored least-significant first in a fixed array sized for the
/// 64-bit ceiling (64 digits suffice for base 2, fewer for larger bases), so
/// neither increment nor seek allocates. Values above 2^64 - 1 are not
/// representable; stepping past the ceiling throws std::overflow_error.
class DigitCounter {
 public:
  static constexpr std::size_t kCapacity = 64;

  explicit DigitCounter(unsigned base, std::uint64_t value = 0) : base_(base) {
    require_base(base);
    if (base > 256) throw std::invalid_argument("DigitCounter: base must be <= 256");
    seek(value);
  }

  unsigned base() const noexcept { return base_; }
  std::uint64_t value() const noexcept { return value_; }
  unsigned digit_sum() const noexcept { return sum_; }

  /// Number of significant digits (0 for value 0). The highest nonzero digit
  /// sits at index size() - 1.
  std::size_t size() const noexcept { return size_; }

  std::span<const std::uint8_t> digits() const noexcept {
    return {digits_.data(), size_};
  }

  unsigned digit(std::size_t j) const noexcept {
    return j < size_ ? digits_[j] : 0u;
  }

  /// Repositions the counter at n by full decomposition.
  void seek(std::uint64_t n) {
    digits_.fill(0);
    value_ = n;
    sum_ = 0;
    size_ = 0;
    while (n != 0) {
      const auto d = static_cast<std::uint8_t>(n % base_);
      digits_[size_++] = d;
      sum_ += d;
      n /= base_;
    }
  }

  /// value += 1.
  void increment() { add_unit(0); }

  /// value += base^position, carrying upward. Used to step a counter that
  /// tracks only the high part of a number in blocks of base^position.
  void add_unit(std::size_t position) {
    std::uint64_t unit = 1;
    for (std::size_t i = 0; i < position; ++i) {
      if (unit > UINT64_MAX / base_) throw std::overflow_error("DigitCounter: 64-bit ceiling exceeded");
      unit *= base_;
    }
    if (value_ > UINT64_MAX - unit) throw std::overflow_error("DigitCounter: 64-bit ceiling exceeded");
    const std::uint8_t top = static_cast<std::uint8_t>(base_ - 1);
    std::size_t j = position;
    while (digits_[j] == top) {
      digits_[j] = 0;
      sum_ -= top;
      ++j;
    }
    ++digits_[j];
    ++sum_;
    value_ += unit;
    if (j >= size_) size_ = j + 1;
  }

  DigitCounter& operator++() {
    increment();
    return *this;
  }

  friend bool operator==(const DigitCounter&, const DigitCounter&) = default;

 private:
  unsigned base_;
  std::uint64_t value_ = 0;
  unsigned sum_ = 0;
  std::size_t size_ = 0;
  std::array<std::uint8_t, kCapacity> digits_{};
};

}  // namespace digitsum
