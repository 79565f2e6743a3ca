#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace cxrkg {

// Exact non-negative rational. The value 0/0 is kept as an explicit
// "undefined" sentinel instead of being normalized away.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den);

  static constexpr Ratio undefined() {
    Ratio r;
    r.num_ = 0;
    r.den_ = 0;
    return r;
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool defined() const { return den_ != 0; }
  bool is_zero() const { return defined() && num_ == 0; }

  // 0.0 for the undefined sentinel.
  double value() const;

  // "n/d", or "0/0" for the sentinel.
  std::string str() const;

  // Rounded to four decimal places, e.g. "0.1902".
  std::string fixed4() const;

  friend Ratio operator+(const Ratio& a, const Ratio& b);
  friend Ratio operator*(const Ratio& a, const Ratio& b);
  friend Ratio operator/(const Ratio& a, const Ratio& b);
  friend bool operator==(const Ratio& a, const Ratio& b) = default;
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::string format_fixed4(double v);

}  // namespace cxrkg
