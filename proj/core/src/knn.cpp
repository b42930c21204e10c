#include <algorithm>
#include <limits>
#include <numeric>

#include "eegpoison/errors.hpp"
#include "model_detail.hpp"

namespace eegpoison::detail {

namespace {

double squared_distance(std::span<const double> a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return sum;
}

}  // namespace

std::shared_ptr<KnnModel> fit_knn(const KnnSpec& spec, const Dataset& train) {
  auto model = std::make_shared<KnnModel>();
  model->k = spec.k;
  model->points.reserve(train.size());
  model->labels.reserve(train.size());
  for (const Sample& s : train.samples) {
    model->points.push_back(s.features);
    model->labels.push_back(s.label);
  }
  return model;
}

RiskLabel KnnModel::predict_one(std::span<const double> features) const {
  const std::size_t n = points.size();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = squared_distance(features, points[i]);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t k_eff = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  // Ties on distance resolve to the lower training index.
  std::partial_sort(order.begin(), order.begin() + k_eff, order.end(),
                    [&dist](std::size_t a, std::size_t b) {
                      if (dist[a] != dist[b]) return dist[a] < dist[b];
                      return a < b;
                    });

  std::array<int, kNumClasses> votes{};
  std::array<double, kNumClasses> nearest;
  nearest.fill(std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < k_eff; ++i) {
    const auto c = static_cast<std::size_t>(labels[order[i]]);
    votes[c] += 1;
    nearest[c] = std::min(nearest[c], dist[order[i]]);
  }

  // Majority vote; tied counts go to the class with the closest single
  // neighbor, residual ties to the lower label.
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (votes[c] > votes[best] ||
        (votes[c] == votes[best] && nearest[c] < nearest[best])) {
      best = c;
    }
  }
  return static_cast<RiskLabel>(best);
}

std::array<double, kNumClasses> KnnModel::scores(
    std::span<const double> features) const {
  const std::size_t n = points.size();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = squared_distance(features, points[i]);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t k_eff = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  std::partial_sort(order.begin(), order.begin() + k_eff, order.end(),
                    [&dist](std::size_t a, std::size_t b) {
                      if (dist[a] != dist[b]) return dist[a] < dist[b];
                      return a < b;
                    });
  std::array<double, kNumClasses> votes{};
  for (std::size_t i = 0; i < k_eff; ++i) {
    votes[static_cast<std::size_t>(labels[order[i]])] += 1.0;
  }
  if (k_eff > 0) {
    for (double& v : votes) v /= static_cast<double>(k_eff);
  }
  return votes;
}

void KnnModel::params_to_json(nlohmann::json& out) const {
  out["k"] = k;
  out["points"] = points;
  nlohmann::json names = nlohmann::json::array();
  for (const RiskLabel label : labels) names.push_back(to_string(label));
  out["labels"] = names;
}

}  // namespace eegpoison::detail
