// Reference predictor speaking the line protocol on stdin/stdout.
//
//   echo_predictor                 1 iff sum_j (j+1)*x_j is odd
//   echo_predictor --sum-geq K     1 iff sum_j x_j >= K
//   echo_predictor --constant V    always V
//   echo_predictor --crash-after N exits with status 3 once N points were read
//   echo_predictor --garbage       answers "2"

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reach/common.h"

int main(int argc, char** argv) {
  CLI::App app{"line-protocol test predictor"};
  std::optional<std::int64_t> sum_geq;
  std::optional<int> constant;
  std::optional<std::int64_t> crash_after;
  bool garbage = false;
  app.add_option("--sum-geq", sum_geq);
  app.add_option("--constant", constant)->check(CLI::Range(0, 1));
  app.add_option("--crash-after", crash_after);
  app.add_flag("--garbage", garbage);
  CLI11_PARSE(app, argc, argv);

  auto score = [&](const reach::Point& x) -> int {
    if (constant) return *constant;
    if (sum_geq) {
      std::int64_t s = 0;
      for (auto v : x) s += v;
      return s >= *sum_geq ? 1 : 0;
    }
    std::int64_t s = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      s += static_cast<std::int64_t>(j + 1) * x[j];
    }
    return static_cast<int>(((s % 2) + 2) % 2);
  };

  std::ios::sync_with_stdio(false);
  std::string line;
  std::string answers;
  std::int64_t seen = 0;
  while (std::getline(std::cin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      std::cout << answers << std::flush;
      answers.clear();
      continue;
    }
    if (crash_after && seen >= *crash_after) return 3;
    ++seen;
    reach::Point x;
    try {
      x = reach::ParsePoint(line);
    } catch (const reach::Error& e) {
      std::cerr << "echo_predictor: " << e.what() << "\n";
      return 2;
    }
    answers += garbage ? "2\n" : (score(x) ? "1\n" : "0\n");
  }
  return 0;
}
