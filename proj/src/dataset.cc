#include "reach/dataset.h"

#include <charconv>

namespace reach {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitCells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    cells.push_back(Trim(line.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

// Non-empty lines with their 1-based line numbers.
std::vector<std::pair<std::string_view, int>> Lines(std::string_view text) {
  std::vector<std::pair<std::string_view, int>> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = Trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (!line.empty()) out.emplace_back(line, line_no);
  }
  return out;
}

std::optional<Value> ToInt(std::string_view cell) {
  Value v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

Dataset ParseDataset(const ActionSet& spec, std::string_view text) {
  auto lines = Lines(text);
  if (lines.empty()) throw ParseError("dataset is empty", 1);
  const auto& features = spec.features();

  Dataset data;
  auto header = SplitCells(lines[0].first);
  int label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "y") {
      if (label_col >= 0) throw ParseError("two `y` columns", lines[0].second);
      label_col = static_cast<int>(c);
    } else {
      data.feature_names.emplace_back(header[c]);
    }
  }
  if (data.feature_names.size() != features.size()) {
    throw ValidationError("dataset header has " +
                          std::to_string(data.feature_names.size()) +
                          " feature columns, action set has " +
                          std::to_string(features.size()));
  }
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (data.feature_names[j] != features[j].name) {
      throw ValidationError("dataset column " + std::to_string(j + 1) +
                            " is '" + data.feature_names[j] +
                            "', action set expects '" + features[j].name + "'");
    }
  }
  if (label_col >= 0) data.labels.emplace();

  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto [line, line_no] = lines[r];
    const std::size_t row = r - 1;
    const std::string where = "row " + std::to_string(row);
    auto cells = SplitCells(line);
    if (cells.size() != header.size()) {
      throw ParseError(where + ": expected " + std::to_string(header.size()) +
                           " cells, got " + std::to_string(cells.size()),
                       line_no);
    }
    Point x;
    x.reserve(features.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const bool is_label = static_cast<int>(c) == label_col;
      const std::string column = is_label ? "y" : std::string(header[c]);
      auto v = ToInt(cells[c]);
      if (!v) {
        throw ParseError(where + ": not an integer: '" + std::string(cells[c]) +
                             "'",
                         line_no, "column " + column);
      }
      if (is_label) {
        if (*v != 0 && *v != 1) {
          throw ParseError(where + ": label must be 0 or 1", line_no,
                           "column y");
        }
        data.labels->push_back(static_cast<int>(*v));
        continue;
      }
      const auto& f = features[x.size()];
      if (*v < f.lower_bound || *v > f.upper_bound) {
        throw ValidationError(
            where + ", column " + column + ": value " + std::to_string(*v) +
            " outside [" + std::to_string(f.lower_bound) + ", " +
            std::to_string(f.upper_bound) + "]");
      }
      x.push_back(*v);
    }
    try {
      spec.RequireInDomain(x);
    } catch (const Error& e) {
      throw ValidationError(where + ": " + e.what());
    }
    data.rows.push_back(std::move(x));
  }
  return data;
}

Dataset LoadDataset(const ActionSet& spec, const std::filesystem::path& path) {
  return ParseDataset(spec, ReadFile(path));
}

std::string SerializeDataset(const Dataset& data) {
  std::string out;
  for (std::size_t j = 0; j < data.feature_names.size(); ++j) {
    if (j > 0) out.push_back(',');
    out += data.feature_names[j];
  }
  if (data.labels) out += ",y";
  out.push_back('\n');
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    out += FormatPoint(data.rows[r]);
    if (data.labels) out += "," + std::to_string((*data.labels)[r]);
    out.push_back('\n');
  }
  return out;
}

MethodOutputs ParseMethodOutputs(const ActionSet& spec, std::string_view text,
                                 std::size_t n_rows) {
  const std::size_t d = spec.dimension();
  MethodOutputs out;
  auto lines = Lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto [line, line_no] = lines[i];
    auto cells = SplitCells(line);
    if (i == 0 && cells[0] == "row_index") continue;
    auto row = ToInt(cells[0]);
    if (!row || *row < 0) {
      throw ParseError("bad row index '" + std::string(cells[0]) + "'", line_no,
                       "row_index");
    }
    if (static_cast<std::size_t>(*row) >= n_rows) {
      throw ValidationError("line " + std::to_string(line_no) + ": row " +
                            std::to_string(*row) + " is past the dataset's " +
                            std::to_string(n_rows) + " rows");
    }
    const auto key = static_cast<std::size_t>(*row);
    if (out.entries.contains(key)) {
      throw ParseError("row " + std::to_string(key) + " listed twice", line_no);
    }
    bool all_blank = true;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      all_blank = all_blank && cells[c].empty();
    }
    if (all_blank) {
      if (cells.size() != 1 && cells.size() != d + 1) {
        throw ParseError("expected " + std::to_string(d) + " action fields",
                         line_no);
      }
      out.entries.emplace(key, std::nullopt);
      continue;
    }
    if (cells.size() != d + 1) {
      throw ParseError("expected " + std::to_string(d) + " action fields, got " +
                           std::to_string(cells.size() - 1),
                       line_no);
    }
    Action a;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      auto v = ToInt(cells[c]);
      if (!v) {
        throw ParseError("not an integer: '" + std::string(cells[c]) + "'",
                         line_no, "a_" + std::to_string(c));
      }
      a.push_back(*v);
    }
    out.entries.emplace(key, std::move(a));
  }
  return out;
}

MethodOutputs LoadMethodOutputs(const ActionSet& spec,
                                const std::filesystem::path& path,
                                std::size_t n_rows) {
  return ParseMethodOutputs(spec, ReadFile(path), n_rows);
}

}  // namespace reach
