#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace mcbv {

/// Fixed-width bitvector value. Arithmetic is modulo 2^width.
///
/// Values up to 64 bits live in a machine word; wider values fall back to
/// an arbitrary-precision integer. Width 0 is only used as a placeholder.
class BvValue {
public:
  using Big = boost::multiprecision::cpp_int;

  BvValue() = default;
  BvValue(unsigned width, std::uint64_t bits);

  static BvValue from_big(unsigned width, const Big &bits);
  static BvValue zero(unsigned width) { return BvValue(width, 0); }
  static BvValue one(unsigned width) { return BvValue(width, 1); }
  static BvValue ones(unsigned width);
  /// 2^n at the given width (zero when n >= width).
  static BvValue power_of_two(unsigned width, unsigned n);
  /// Parses a string of '0'/'1' characters, most significant first.
  static BvValue from_binary(std::string_view digits);
  static BvValue from_hex(std::string_view digits);
  static BvValue from_decimal(unsigned width, std::string_view digits);

  unsigned width() const { return width_; }
  bool is_small() const { return width_ <= 64; }
  /// Only valid when is_small().
  std::uint64_t small() const { return small_; }
  Big to_big() const;

  bool bit(unsigned i) const;
  bool is_zero() const;
  bool is_one() const;
  bool is_ones() const;
  /// n such that the value equals 2^n, if it is a power of two.
  std::optional<unsigned> exact_log2() const;

  std::string to_binary() const;
  std::string to_decimal() const;

  friend BvValue operator+(const BvValue &a, const BvValue &b);
  friend BvValue operator-(const BvValue &a, const BvValue &b);
  friend BvValue operator*(const BvValue &a, const BvValue &b);
  friend BvValue operator-(const BvValue &a);
  friend BvValue operator~(const BvValue &a);

  BvValue concat(const BvValue &low) const;
  /// Bits [hi:lo) with lo included and hi excluded.
  BvValue extract(unsigned hi, unsigned lo) const;
  BvValue sign_extend(unsigned extra) const;
  BvValue zero_extend(unsigned extra) const;

  bool ult(const BvValue &o) const;
  bool ule(const BvValue &o) const { return !o.ult(*this); }
  bool slt(const BvValue &o) const;
  bool sle(const BvValue &o) const { return !o.slt(*this); }

  friend bool operator==(const BvValue &a, const BvValue &b);
  /// Total order: by width, then unsigned value.
  friend std::strong_ordering operator<=>(const BvValue &a, const BvValue &b);

  std::size_t hash() const;

private:
  unsigned width_ = 0;
  std::uint64_t small_ = 0;
  Big big_;
};

struct BvValueHash {
  std::size_t operator()(const BvValue &v) const { return v.hash(); }
};

} // namespace mcbv
