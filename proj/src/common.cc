#include "reach/common.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace reach {

std::size_t PointHash::operator()(std::span<const Value> p) const noexcept {
  // FNV-1a over the raw values.
  std::uint64_t h = 1469598103934665603ULL;
  for (Value v : p) {
    auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (u >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return static_cast<std::size_t>(h);
}

Value L1Norm(std::span<const Value> a) {
  Value total = 0;
  for (Value v : a) total += v < 0 ? -v : v;
  return total;
}

Value L1Distance(std::span<const Value> a, std::span<const Value> b) {
  Value total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Value d = a[i] - b[i];
    total += d < 0 ? -d : d;
  }
  return total;
}

Point Apply(std::span<const Value> x, std::span<const Value> a) {
  Point out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += a[i];
  return out;
}

Action Difference(std::span<const Value> target, std::span<const Value> x) {
  Action out(target.begin(), target.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= x[i];
  return out;
}

std::string FormatPoint(std::span<const Value> p, char sep) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += std::to_string(p[i]);
  }
  return out;
}

Point ParsePoint(std::string_view text, char sep) {
  Point out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = text.find(sep, start);
    std::string_view cell =
        text.substr(start, end == std::string_view::npos ? text.size() - start
                                                         : end - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
      cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' ||
                             cell.back() == '\r'))
      cell.remove_suffix(1);
    Value v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw ParseError("not an integer: '" + std::string(cell) + "'", 0,
                       "column " + std::to_string(out.size() + 1));
    }
    out.push_back(v);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

ParseError::ParseError(const std::string& message, int line, std::string field)
    : Error([&] {
        std::string where;
        if (line > 0) where += "line " + std::to_string(line);
        if (!field.empty()) {
          if (!where.empty()) where += ", ";
          where += field;
        }
        return where.empty() ? message : where + ": " + message;
      }()),
      line_(line),
      field_(std::move(field)) {}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return buf.str();
}

void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() +
                  ": " + ec.message());
  }
}

}  // namespace reach
