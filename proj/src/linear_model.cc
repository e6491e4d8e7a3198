#include <algorithm>
#include <cctype>
#include <limits>
#include <optional>

#include "reach/models.h"

namespace reach {
namespace {

using BigInt = LinearModel::BigInt;

struct Decimal {
  BigInt mantissa;
  int exponent = 0;  // value = mantissa * 10^exponent
};

BigInt Pow10(int n) {
  BigInt out = 1;
  for (int i = 0; i < n; ++i) out *= 10;
  return out;
}

Decimal ParseDecimal(std::string_view s) {
  auto fail = [&]() -> Decimal {
    throw ParseError("not a decimal number: '" + std::string(s) + "'");
  };
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  std::string digits;
  int exponent = 0;
  bool seen_digit = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    digits.push_back(s[i++]);
    seen_digit = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      digits.push_back(s[i++]);
      --exponent;
      seen_digit = true;
    }
  }
  if (!seen_digit) return fail();
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      exp_negative = s[i++] == '-';
    }
    if (i == s.size()) return fail();
    int e = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      e = e * 10 + (s[i++] - '0');
      if (e > 400) throw ParseError("exponent out of range in '" +
                                    std::string(s) + "'");
    }
    exponent += exp_negative ? -e : e;
  }
  if (i != s.size()) return fail();
  // cpp_int reads a leading 0 as octal.
  const auto nonzero = digits.find_first_not_of('0');
  digits = nonzero == std::string::npos ? "0" : digits.substr(nonzero);
  Decimal out;
  out.mantissa = BigInt(digits);
  if (negative) out.mantissa = -out.mantissa;
  out.exponent = exponent;
  return out;
}

std::string FormatScaled(const BigInt& v, int scale) {
  std::string digits = (v < 0 ? BigInt(-v) : v).str();
  std::string out = v < 0 ? "-" : "";
  if (scale == 0) return out + digits;
  if (static_cast<int>(digits.size()) <= scale) {
    digits.insert(0, scale - digits.size() + 1, '0');
  }
  std::string frac = digits.substr(digits.size() - scale);
  digits.resize(digits.size() - scale);
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  out += digits;
  if (!frac.empty()) out += "." + frac;
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

}  // namespace

LinearModel::LinearModel(const std::vector<std::string>& weights,
                         const std::string& intercept) {
  std::vector<Decimal> parsed;
  for (const auto& w : weights) parsed.push_back(ParseDecimal(Trim(w)));
  Decimal b = ParseDecimal(Trim(intercept));
  int scale = std::max(0, -b.exponent);
  for (const auto& w : parsed) scale = std::max(scale, -w.exponent);
  auto scaled = [&](const Decimal& dec) {
    const int shift = scale + dec.exponent;
    return dec.mantissa * Pow10(shift);
  };
  for (const auto& w : parsed) weights_.push_back(scaled(w));
  intercept_ = scaled(b);
  scale_ = scale;
  Normalize();
}

void LinearModel::Normalize() {
  auto all_divisible = [&] {
    if (intercept_ % 10 != 0) return false;
    return std::all_of(weights_.begin(), weights_.end(),
                       [](const BigInt& w) { return w % 10 == 0; });
  };
  while (scale_ > 0 && all_divisible()) {
    intercept_ /= 10;
    for (auto& w : weights_) w /= 10;
    --scale_;
  }
  const BigInt limit = BigInt(1) << 62;
  auto fits = [&](const BigInt& v) { return v < limit && v > -limit; };
  small_ = fits(intercept_) && std::all_of(weights_.begin(), weights_.end(), fits);
  small_weights_.clear();
  if (small_) {
    for (const auto& w : weights_) {
      small_weights_.push_back(w.convert_to<std::int64_t>());
    }
    small_intercept_ = intercept_.convert_to<std::int64_t>();
  }
}

Prediction LinearModel::Predict(std::span<const Value> x) const {
  if (x.size() != weights_.size()) {
    throw DomainError("point has " + std::to_string(x.size()) +
                      " values, model expects " +
                      std::to_string(weights_.size()));
  }
  if (small_) {
    __int128 total = small_intercept_;
    bool overflow = false;
    for (std::size_t j = 0; j < x.size() && !overflow; ++j) {
      const __int128 term =
          static_cast<__int128>(small_weights_[j]) * static_cast<__int128>(x[j]);
      overflow = __builtin_add_overflow(total, term, &total);
    }
    if (!overflow) return total >= 0 ? 1 : 0;
  }
  BigInt total = intercept_;
  for (std::size_t j = 0; j < x.size(); ++j) total += weights_[j] * x[j];
  return total >= 0 ? 1 : 0;
}

std::vector<Prediction> LinearModel::PredictBatch(
    std::span<const Point> points) {
  std::vector<Prediction> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(Predict(p));
  return out;
}

LinearModel ParseLinearModel(std::string_view text, std::size_t dimension) {
  std::optional<std::string> intercept;
  std::optional<std::vector<std::string>> weights;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected b=<number> or w=<numbers>", line_no);
    }
    std::string_view key = Trim(line.substr(0, eq));
    std::string_view value = Trim(line.substr(eq + 1));
    try {
      if (key == "b") {
        if (intercept) throw ParseError("intercept given twice", line_no, "b");
        ParseDecimal(value);
        intercept = std::string(value);
      } else if (key == "w") {
        if (weights) throw ParseError("weights given twice", line_no, "w");
        std::vector<std::string> ws;
        std::size_t start = 0;
        while (true) {
          std::size_t comma = value.find(',', start);
          std::string_view cell = Trim(value.substr(
              start, comma == std::string_view::npos ? std::string_view::npos
                                                     : comma - start));
          ParseDecimal(cell);
          ws.emplace_back(cell);
          if (comma == std::string_view::npos) break;
          start = comma + 1;
        }
        weights = std::move(ws);
      } else {
        throw ParseError("unknown key '" + std::string(key) + "'", line_no);
      }
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(e.what(), line_no, std::string(key));
    }
  }
  if (!intercept) throw ParseError("missing intercept line b=...");
  if (!weights) throw ParseError("missing weights line w=...");
  if (dimension != 0 && weights->size() != dimension) {
    throw DomainError("model has " + std::to_string(weights->size()) +
                      " weights, action set has " + std::to_string(dimension) +
                      " features");
  }
  return LinearModel(*weights, *intercept);
}

LinearModel LoadLinearModel(const std::filesystem::path& path,
                            std::size_t dimension) {
  return ParseLinearModel(ReadFile(path), dimension);
}

std::string SerializeLinearModel(const LinearModel& model) {
  std::string out = "b=" + FormatScaled(model.scaled_intercept(), model.scale());
  out += "\nw=";
  const auto& ws = model.scaled_weights();
  for (std::size_t j = 0; j < ws.size(); ++j) {
    if (j > 0) out.push_back(',');
    out += FormatScaled(ws[j], model.scale());
  }
  out.push_back('\n');
  return out;
}

}  // namespace reach
