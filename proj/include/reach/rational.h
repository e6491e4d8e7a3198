#ifndef REACH_RATIONAL_H_
#define REACH_RATIONAL_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace reach {

// Exact fraction with 64-bit parts, always normalized (den > 0, gcd = 1).
// Used for linkage scales, FNR thresholds and exclusion radii, where the
// values are small and a float comparison would be a liability.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  // Accepts "3", "-0.25", "1/3", "2.5e-1". Throws ParseError.
  static Rational Parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  // Truncates toward zero: (7/2).Truncate() == 3, (-7/2).Truncate() == -3.
  std::int64_t Truncate() const { return num_ / den_; }
  // trunc(this * v), computed without intermediate overflow.
  std::int64_t ScaleTruncate(std::int64_t v) const;

  bool IsPositive() const { return num_ > 0; }
  double ToDouble() const { return static_cast<double>(num_) / den_; }

  // "3" for integers, "num/den" otherwise.
  std::string ToString() const;

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace reach

#endif  // REACH_RATIONAL_H_
