#ifndef REACH_MODELS_H_
#define REACH_MODELS_H_

#include <sys/types.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reach/common.h"

namespace reach {

using Prediction = std::uint8_t;  // 0 or 1

// A black-box classifier over integer points.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::size_t dimension() const = 0;
  // One 0/1 answer per point, same order.
  virtual std::vector<Prediction> PredictBatch(std::span<const Point> points) = 0;
};

// f(x) = 1 iff w.x + b >= 0, evaluated exactly. Coefficients are decimals
// ("-2", "0.35", "1.5e-3"); internally they share one power-of-ten scale.
class LinearModel : public Predictor {
 public:
  using BigInt = boost::multiprecision::cpp_int;

  // Exact decimal strings.
  LinearModel(const std::vector<std::string>& weights,
              const std::string& intercept);

  std::size_t dimension() const override { return weights_.size(); }
  std::vector<Prediction> PredictBatch(std::span<const Point> points) override;
  Prediction Predict(std::span<const Value> x) const;

  // Coefficients scaled by 10^scale().
  const std::vector<BigInt>& scaled_weights() const { return weights_; }
  const BigInt& scaled_intercept() const { return intercept_; }
  int scale() const { return scale_; }

  friend bool operator==(const LinearModel& a, const LinearModel& b) {
    return a.scale_ == b.scale_ && a.weights_ == b.weights_ &&
           a.intercept_ == b.intercept_;
  }

 private:
  void Normalize();

  std::vector<BigInt> weights_;
  BigInt intercept_;
  int scale_ = 0;
  // Copies of the scaled coefficients when every one fits in 62 bits.
  bool small_ = false;
  std::vector<std::int64_t> small_weights_;
  std::int64_t small_intercept_ = 0;
};

// Model file:
//   b=<decimal>
//   w=<decimal>,<decimal>,...
// in either order, '#' comments and blank lines allowed. `dimension`, when
// nonzero, must equal the number of weights (DomainError otherwise).
LinearModel ParseLinearModel(std::string_view text, std::size_t dimension = 0);
LinearModel LoadLinearModel(const std::filesystem::path& path,
                            std::size_t dimension = 0);
std::string SerializeLinearModel(const LinearModel& model);

// Runs `command` through /bin/sh and talks to it over stdin/stdout:
// each round sends one comma-separated line per point and a blank line, then
// reads one "0" or "1" line per point. The process starts on the first
// batch and lives until Close() or destruction.
class ExternalPredictor : public Predictor {
 public:
  ExternalPredictor(std::string command, std::size_t dimension);
  ~ExternalPredictor() override;
  ExternalPredictor(const ExternalPredictor&) = delete;
  ExternalPredictor& operator=(const ExternalPredictor&) = delete;

  std::size_t dimension() const override { return dimension_; }
  std::vector<Prediction> PredictBatch(std::span<const Point> points) override;

  // Closes stdin and reaps the child. Throws ModelError on unread output or
  // an abnormal exit; a no-op when the process never started.
  void Close();

 private:
  void Start();
  void Abort();
  std::string ExitDescription();

  std::string command_;
  std::size_t dimension_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string inbox_;
  int exit_status_ = 0;
  bool reaped_ = false;
};

struct PredictorStats {
  std::uint64_t queries = 0;          // points asked of the handle
  std::uint64_t backend_points = 0;   // points forwarded to the model
  std::uint64_t backend_batches = 0;  // model round trips
};

// Front end used by verification: caches answers per point and rejects a
// model that answers the same point two ways.
class PredictorHandle {
 public:
  explicit PredictorHandle(std::unique_ptr<Predictor> model,
                           bool cache = true);

  std::size_t dimension() const { return model_->dimension(); }
  std::vector<Prediction> Predict(std::span<const Point> points);
  Prediction Predict(const Point& x);

  const PredictorStats& stats() const { return stats_; }
  Predictor& model() { return *model_; }

 private:
  std::unique_ptr<Predictor> model_;
  bool cache_;
  std::unordered_map<Point, Prediction, PointHash> seen_;
  PredictorStats stats_;
};

using PredictorFactory = std::function<std::unique_ptr<Predictor>()>;

}  // namespace reach

#endif  // REACH_MODELS_H_
