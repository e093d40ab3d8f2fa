#include "mcbv/bv_value.hpp"

#include <algorithm>
#include <stdexcept>

namespace mcbv {

namespace {

std::uint64_t mask64(unsigned width) {
  return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

BvValue::Big big_mask(unsigned width) {
  return (BvValue::Big(1) << width) - 1;
}

} // namespace

BvValue::BvValue(unsigned width, std::uint64_t bits) : width_(width) {
  if (is_small()) {
    small_ = bits & mask64(width);
  } else {
    big_ = bits;
  }
}

BvValue BvValue::from_big(unsigned width, const Big &bits) {
  BvValue v;
  v.width_ = width;
  Big masked = bits;
  if (masked < 0) {
    // Two's complement wrap into [0, 2^width).
    Big modulus = Big(1) << width;
    masked %= modulus;
    if (masked < 0)
      masked += modulus;
  }
  masked &= big_mask(width);
  if (v.is_small())
    v.small_ = static_cast<std::uint64_t>(masked);
  else
    v.big_ = masked;
  return v;
}

BvValue BvValue::ones(unsigned width) {
  if (width <= 64)
    return BvValue(width, mask64(width));
  return from_big(width, big_mask(width));
}

BvValue BvValue::power_of_two(unsigned width, unsigned n) {
  if (n >= width)
    return zero(width);
  if (width <= 64)
    return BvValue(width, std::uint64_t{1} << n);
  return from_big(width, Big(1) << n);
}

BvValue BvValue::from_binary(std::string_view digits) {
  if (digits.empty())
    throw std::invalid_argument("empty binary literal");
  Big acc = 0;
  for (char c : digits) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("invalid binary digit");
    acc = (acc << 1) | (c == '1' ? 1 : 0);
  }
  return from_big(static_cast<unsigned>(digits.size()), acc);
}

BvValue BvValue::from_hex(std::string_view digits) {
  if (digits.empty())
    throw std::invalid_argument("empty hex literal");
  Big acc = 0;
  for (char c : digits) {
    int d;
    if (c >= '0' && c <= '9')
      d = c - '0';
    else if (c >= 'a' && c <= 'f')
      d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      d = c - 'A' + 10;
    else
      throw std::invalid_argument("invalid hex digit");
    acc = (acc << 4) | d;
  }
  return from_big(static_cast<unsigned>(digits.size() * 4), acc);
}

BvValue BvValue::from_decimal(unsigned width, std::string_view digits) {
  if (digits.empty())
    throw std::invalid_argument("empty decimal literal");
  Big acc = 0;
  for (char c : digits) {
    if (c < '0' || c > '9')
      throw std::invalid_argument("invalid decimal digit");
    acc = acc * 10 + (c - '0');
  }
  return from_big(width, acc);
}

BvValue::Big BvValue::to_big() const { return is_small() ? Big(small_) : big_; }

bool BvValue::bit(unsigned i) const {
  if (i >= width_)
    return false;
  if (is_small())
    return (small_ >> i) & 1u;
  return boost::multiprecision::bit_test(big_, i);
}

bool BvValue::is_zero() const { return is_small() ? small_ == 0 : big_ == 0; }

bool BvValue::is_one() const { return is_small() ? small_ == 1 : big_ == 1; }

bool BvValue::is_ones() const {
  return is_small() ? small_ == mask64(width_) : big_ == big_mask(width_);
}

std::optional<unsigned> BvValue::exact_log2() const {
  if (is_zero())
    return std::nullopt;
  if (is_small()) {
    if (small_ & (small_ - 1))
      return std::nullopt;
    return static_cast<unsigned>(__builtin_ctzll(small_));
  }
  unsigned lsb = boost::multiprecision::lsb(big_);
  if (boost::multiprecision::msb(big_) != lsb)
    return std::nullopt;
  return lsb;
}

std::string BvValue::to_binary() const {
  std::string s(width_, '0');
  for (unsigned i = 0; i < width_; ++i)
    if (bit(i))
      s[width_ - 1 - i] = '1';
  return s;
}

std::string BvValue::to_decimal() const { return to_big().str(); }

BvValue operator+(const BvValue &a, const BvValue &b) {
  if (a.is_small())
    return BvValue(a.width_, a.small_ + b.small_);
  return BvValue::from_big(a.width_, a.big_ + b.big_);
}

BvValue operator-(const BvValue &a, const BvValue &b) {
  if (a.is_small())
    return BvValue(a.width_, a.small_ - b.small_);
  return BvValue::from_big(a.width_, a.big_ - b.big_ + (BvValue::Big(1) << a.width_));
}

BvValue operator*(const BvValue &a, const BvValue &b) {
  if (a.is_small())
    return BvValue(a.width_, a.small_ * b.small_);
  return BvValue::from_big(a.width_, a.big_ * b.big_);
}

BvValue operator-(const BvValue &a) { return BvValue::zero(a.width_) - a; }

BvValue operator~(const BvValue &a) {
  if (a.is_small())
    return BvValue(a.width_, ~a.small_);
  return BvValue::from_big(a.width_, a.big_ ^ big_mask(a.width_));
}

BvValue BvValue::concat(const BvValue &low) const {
  unsigned w = width_ + low.width_;
  if (w <= 64)
    return BvValue(w, (width_ == 0 ? 0 : (small_ << low.width_)) | low.small_);
  return from_big(w, (to_big() << low.width_) | low.to_big());
}

BvValue BvValue::extract(unsigned hi, unsigned lo) const {
  if (hi > width_ || lo >= hi)
    throw std::out_of_range("bad extract bounds");
  unsigned w = hi - lo;
  if (is_small())
    return BvValue(w, small_ >> lo);
  return from_big(w, big_ >> lo);
}

BvValue BvValue::sign_extend(unsigned extra) const {
  if (width_ == 0 || !bit(width_ - 1))
    return zero_extend(extra);
  return ones(extra).concat(*this);
}

BvValue BvValue::zero_extend(unsigned extra) const {
  unsigned w = width_ + extra;
  if (w <= 64)
    return BvValue(w, small_);
  return from_big(w, to_big());
}

bool BvValue::ult(const BvValue &o) const {
  if (is_small())
    return small_ < o.small_;
  return big_ < o.big_;
}

bool BvValue::slt(const BvValue &o) const {
  bool sa = bit(width_ - 1), sb = o.bit(width_ - 1);
  if (sa != sb)
    return sa;
  return ult(o);
}

bool operator==(const BvValue &a, const BvValue &b) {
  if (a.width_ != b.width_)
    return false;
  return a.is_small() ? a.small_ == b.small_ : a.big_ == b.big_;
}

std::strong_ordering operator<=>(const BvValue &a, const BvValue &b) {
  if (a.width_ != b.width_)
    return a.width_ <=> b.width_;
  if (a.is_small())
    return a.small_ <=> b.small_;
  if (a.big_ < b.big_)
    return std::strong_ordering::less;
  if (b.big_ < a.big_)
    return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::size_t BvValue::hash() const {
  std::size_t h = std::hash<unsigned>{}(width_);
  if (is_small())
    return h * 1000003u ^ std::hash<std::uint64_t>{}(small_);
  return h * 1000003u ^ std::hash<std::string>{}(big_.str());
}

} // namespace mcbv
