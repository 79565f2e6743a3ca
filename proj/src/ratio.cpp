#include "cxrkg/ratio.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace cxrkg {
namespace {

__extension__ using i128 = __int128;

std::int64_t narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("ratio overflow");
  return static_cast<std::int64_t>(v);
}

Ratio reduce(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("ratio with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return Ratio(narrow(num), narrow(den));
}

}  // namespace

Ratio::Ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("ratio with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

double Ratio::value() const {
  if (!defined()) return 0.0;
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Ratio::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

std::string Ratio::fixed4() const { return format_fixed4(value()); }

std::string format_fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

Ratio operator+(const Ratio& a, const Ratio& b) {
  if (!a.defined() || !b.defined()) return Ratio::undefined();
  return reduce(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}

Ratio operator*(const Ratio& a, const Ratio& b) {
  if (!a.defined() || !b.defined()) return Ratio::undefined();
  return reduce(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

Ratio operator/(const Ratio& a, const Ratio& b) {
  if (!a.defined() || !b.defined() || b.num_ == 0) return Ratio::undefined();
  return reduce(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
  if (!a.defined() || !b.defined()) {
    if (a.defined() == b.defined()) return std::strong_ordering::equal;
    return a.defined() ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  const i128 lhs = static_cast<i128>(a.num_) * b.den_;
  const i128 rhs = static_cast<i128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace cxrkg
