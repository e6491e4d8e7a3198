#include "reach/rational.h"

#include <charconv>
#include <numeric>

#include "reach/common.h"

namespace reach {
namespace {

using Wide = __int128;

std::int64_t Narrow(Wide v, std::string_view what) {
  if (v > INT64_MAX || v < INT64_MIN) {
    throw ParseError("rational out of range: " + std::string(what));
  }
  return static_cast<std::int64_t>(v);
}

Wide Gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ValidationError("rational with zero denominator");
  Wide n = num, d = den;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  Wide g = Gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num_ = Narrow(n, "normalization");
  den_ = Narrow(d, "normalization");
}

Rational Rational::Parse(std::string_view text) {
  auto trimmed = text;
  while (!trimmed.empty() && trimmed.front() == ' ') trimmed.remove_prefix(1);
  while (!trimmed.empty() && trimmed.back() == ' ') trimmed.remove_suffix(1);
  const std::string original(trimmed);
  auto fail = [&]() -> Rational {
    throw ParseError("not a rational number: '" + original + "'");
  };
  if (trimmed.empty()) return fail();

  if (auto slash = trimmed.find('/'); slash != std::string_view::npos) {
    std::int64_t n = 0, d = 0;
    auto lhs = trimmed.substr(0, slash);
    auto rhs = trimmed.substr(slash + 1);
    auto r1 = std::from_chars(lhs.data(), lhs.data() + lhs.size(), n);
    auto r2 = std::from_chars(rhs.data(), rhs.data() + rhs.size(), d);
    if (lhs.empty() || rhs.empty() || r1.ec != std::errc() ||
        r2.ec != std::errc() || r1.ptr != lhs.data() + lhs.size() ||
        r2.ptr != rhs.data() + rhs.size() || d == 0) {
      return fail();
    }
    return Rational(n, d);
  }

  // Decimal with optional exponent.
  bool negative = false;
  std::size_t i = 0;
  if (trimmed[i] == '+' || trimmed[i] == '-') {
    negative = trimmed[i] == '-';
    ++i;
  }
  Wide mantissa = 0;
  int scale = 0;  // value = mantissa * 10^scale
  bool any_digit = false, seen_point = false;
  for (; i < trimmed.size(); ++i) {
    char c = trimmed[i];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (mantissa > (Wide{1} << 100)) return fail();
      if (seen_point) --scale;
      any_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) return fail();
  if (i < trimmed.size()) {
    if (trimmed[i] != 'e' && trimmed[i] != 'E') return fail();
    ++i;
    int exp = 0;
    auto rest = trimmed.substr(i);
    if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
    auto r = std::from_chars(rest.data(), rest.data() + rest.size(), exp);
    if (rest.empty() || r.ec != std::errc() ||
        r.ptr != rest.data() + rest.size()) {
      return fail();
    }
    scale += exp;
  }
  Wide num = negative ? -mantissa : mantissa;
  Wide den = 1;
  for (; scale > 0; --scale) {
    num *= 10;
    if (num > INT64_MAX || num < INT64_MIN) return fail();
  }
  for (; scale < 0; ++scale) {
    den *= 10;
    if (den > (Wide{1} << 100)) return fail();
  }
  Wide g = Gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX) return fail();
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

std::int64_t Rational::ScaleTruncate(std::int64_t v) const {
  Wide product = static_cast<Wide>(num_) * v;
  return static_cast<std::int64_t>(product / den_);
}

std::string Rational::ToString() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  Wide lhs = static_cast<Wide>(a.num_) * b.den_;
  Wide rhs = static_cast<Wide>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace reach
