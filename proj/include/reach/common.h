#ifndef REACH_COMMON_H_
#define REACH_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reach {

// Feature values and action components are integers: every feature domain in
// this library is discrete and bounded.
using Value = std::int64_t;
using Point = std::vector<Value>;
using Action = std::vector<Value>;

struct PointHash {
  std::size_t operator()(std::span<const Value> p) const noexcept;
  std::size_t operator()(const Point& p) const noexcept {
    return (*this)(std::span<const Value>(p));
  }
};

Value L1Norm(std::span<const Value> a);
Value L1Distance(std::span<const Value> a, std::span<const Value> b);

// x + a, element-wise. Sizes must match.
Point Apply(std::span<const Value> x, std::span<const Value> a);
// target - x, element-wise.
Action Difference(std::span<const Value> target, std::span<const Value> x);

// Comma separated integers, no spaces: "0,1,-3".
std::string FormatPoint(std::span<const Value> p, char sep = ',');
// Inverse of FormatPoint; throws ParseError on malformed input.
Point ParsePoint(std::string_view text, char sep = ',');

// Error hierarchy. ParseError and ValidationError are input problems;
// DomainError flags a point/action that does not fit the action set;
// ModelError covers predictor I/O and protocol faults.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line = 0, std::string field = {});
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Whole-file helpers; failures raise IoError.
std::string ReadFile(const std::filesystem::path& path);
// Writes to a temp file in the same directory, then renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

}  // namespace reach

#endif  // REACH_COMMON_H_
