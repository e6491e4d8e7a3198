#include "reach/models.h"

namespace reach {

PredictorHandle::PredictorHandle(std::unique_ptr<Predictor> model, bool cache)
    : model_(std::move(model)), cache_(cache) {
  if (!model_) throw ModelError("null predictor");
}

std::vector<Prediction> PredictorHandle::Predict(std::span<const Point> points) {
  const std::size_t d = model_->dimension();
  for (const auto& p : points) {
    if (p.size() != d) {
      throw DomainError("point (" + FormatPoint(p) + ") has " +
                        std::to_string(p.size()) + " values, model expects " +
                        std::to_string(d));
    }
  }
  stats_.queries += points.size();

  std::vector<Prediction> out(points.size(), 0);
  std::vector<Point> ask;
  std::vector<std::size_t> ask_for;  // position in `points` per asked point
  std::unordered_map<Point, std::size_t, PointHash> asked;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (cache_) {
      if (auto it = seen_.find(points[i]); it != seen_.end()) {
        out[i] = it->second;
        continue;
      }
      if (asked.contains(points[i])) continue;
      asked.emplace(points[i], ask.size());
    }
    ask.push_back(points[i]);
    ask_for.push_back(i);
  }
  if (!ask.empty()) {
    std::vector<Prediction> answers = model_->PredictBatch(ask);
    if (answers.size() != ask.size()) {
      throw ModelError("model returned " + std::to_string(answers.size()) +
                       " answers for " + std::to_string(ask.size()) +
                       " points");
    }
    ++stats_.backend_batches;
    stats_.backend_points += ask.size();
    for (std::size_t k = 0; k < ask.size(); ++k) {
      const Prediction y = answers[k];
      if (y > 1) throw ModelError("model returned a value other than 0 or 1");
      auto [it, inserted] = seen_.try_emplace(ask[k], y);
      if (!inserted && it->second != y) {
        throw ModelError("model gave two different answers for (" +
                         FormatPoint(ask[k]) + ")");
      }
      out[ask_for[k]] = y;
    }
  }
  if (cache_) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      out[i] = seen_.at(points[i]);
    }
  }
  return out;
}

Prediction PredictorHandle::Predict(const Point& x) {
  return Predict(std::span<const Point>(&x, 1)).front();
}

}  // namespace reach
