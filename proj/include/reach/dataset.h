#ifndef REACH_DATASET_H_
#define REACH_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reach/action_set.h"

namespace reach {

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<Point> rows;
  std::optional<std::vector<int>> labels;  // from a `y` column
};

// Comma-separated text with a header. The header lists the action set's
// feature names in order; a `y` column of 0/1 labels may appear anywhere.
// Rows are numbered from 0 in error messages and everywhere else; every row
// must lie in the action set's domain.
Dataset ParseDataset(const ActionSet& spec, std::string_view text);
Dataset LoadDataset(const ActionSet& spec, const std::filesystem::path& path);
std::string SerializeDataset(const Dataset& data);

// Third-party recourse output per dataset row: `row_index,a_1,...,a_d`, one
// line per row, optional header starting with `row_index`. All action fields
// blank (or absent) means the method returned no action.
struct MethodOutputs {
  std::map<std::size_t, std::optional<Action>> entries;
};

MethodOutputs ParseMethodOutputs(const ActionSet& spec, std::string_view text,
                                 std::size_t n_rows);
MethodOutputs LoadMethodOutputs(const ActionSet& spec,
                                const std::filesystem::path& path,
                                std::size_t n_rows);

}  // namespace reach

#endif  // REACH_DATASET_H_
