#include <algorithm>
#include <cmath>
#include <numeric>

#include "eegpoison/errors.hpp"
#include "eegpoison/rng.hpp"
#include "model_detail.hpp"

namespace eegpoison {

double samme_alpha(double weighted_error, int n_classes) {
  const double err = std::clamp(weighted_error, 1e-10, 1.0 - 1e-10);
  // Single log of the product keeps the chance boundary exact:
  // err = (K-1)/K gives ((1-err)/err)*(K-1) == 1.0 and alpha == 0.0.
  return std::log(((1.0 - err) / err) * static_cast<double>(n_classes - 1));
}

namespace detail {

namespace {

std::size_t weighted_majority(const std::array<double, kNumClasses>& mass) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (mass[c] > mass[best]) best = c;
  }
  return best;
}

}  // namespace

Stump best_stump(const std::vector<Sample>& samples,
                 const std::vector<double>& weights,
                 std::span<const int> feature_order) {
  const std::size_t n = samples.size();
  const std::size_t n_features = samples.front().features.size();

  std::vector<int> ascending;
  if (feature_order.empty()) {
    ascending.resize(n_features);
    std::iota(ascending.begin(), ascending.end(), 0);
    feature_order = ascending;
  }

  std::array<double, kNumClasses> total{};
  double total_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total[static_cast<std::size_t>(samples[i].label)] += weights[i];
    total_w += weights[i];
  }

  // Seed candidate: the constant stump predicting the weighted majority.
  Stump best;
  best.right = static_cast<RiskLabel>(weighted_majority(total));
  double best_err = total_w - total[static_cast<std::size_t>(best.right)];

  std::vector<std::pair<double, std::size_t>> values(n);
  for (const int feature : feature_order) {
    const auto f = static_cast<std::size_t>(feature);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = {samples[i].features[f], i};
    }
    std::sort(values.begin(), values.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::array<double, kNumClasses> left_mass{};
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t idx = values[i].second;
      left_mass[static_cast<std::size_t>(samples[idx].label)] += weights[idx];
      if (values[i].first == values[i + 1].first) continue;

      const std::size_t lc = weighted_majority(left_mass);
      std::array<double, kNumClasses> right_mass{};
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        right_mass[c] = total[c] - left_mass[c];
      }
      const std::size_t rc = weighted_majority(right_mass);
      const double err = total_w - left_mass[lc] - right_mass[rc];
      if (err < best_err - 1e-12) {
        best.feature = feature;
        best.threshold =
            values[i].first + (values[i + 1].first - values[i].first) / 2.0;
        best.left = static_cast<RiskLabel>(lc);
        best.right = static_cast<RiskLabel>(rc);
        best_err = err;
      }
    }
  }
  return best;
}

std::shared_ptr<AdaBoostModel> fit_adaboost(const AdaBoostSpec& spec,
                                            const Dataset& train,
                                            TrainingSummary& summary,
                                            const FitBudget* budget) {
  const std::size_t n = train.size();
  const double chance = (kNumClasses - 1.0) / kNumClasses;

  auto model = std::make_shared<AdaBoostModel>();
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));

  // Equal-error stumps follow the scan order; reshuffling it every round
  // keeps repeated ties from locking the weight vector into short cycles.
  Rng order_rng(Rng::derive(spec.seed, "boost"));
  std::vector<int> feature_order(train.n_features());
  std::iota(feature_order.begin(), feature_order.end(), 0);

  for (int round = 0; round < spec.n_rounds; ++round) {
    if (budget != nullptr && budget->expired()) {
      throw Error(ErrorKind::Timeout, "boosting fit exceeded budget");
    }
    order_rng.shuffle(feature_order);
    const Stump stump = best_stump(train.samples, weights, feature_order);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (stump.predict(train.samples[i].features) != train.samples[i].label) {
        err += weights[i];
      }
    }
    if (err >= chance) break;  // no better than chance: discard and stop

    const double alpha = samme_alpha(err, kNumClasses);
    model->stumps.push_back(stump);
    model->alphas.push_back(alpha);
    summary.boost_errors.push_back(err);
    summary.boost_alphas.push_back(alpha);

    if (err <= 0.0) {
      summary.boost_weight_sums.push_back(1.0);
      break;  // perfect stump: nothing left to reweight
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (stump.predict(train.samples[i].features) != train.samples[i].label) {
        weights[i] *= std::exp(alpha);
      }
      sum += weights[i];
    }
    double renorm = 0.0;
    for (auto& w : weights) {
      w /= sum;
      renorm += w;
    }
    summary.boost_weight_sums.push_back(renorm);
  }

  if (model->stumps.empty()) {
    // Majority-label fallback; ties resolve to the lowest label.
    const auto counts = train.class_counts();
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c) {
      if (counts[c] > counts[best]) best = c;
    }
    model->fallback = static_cast<RiskLabel>(best);
  }
  summary.rounds_completed = static_cast<int>(model->stumps.size());
  return model;
}

RiskLabel AdaBoostModel::predict_one(std::span<const double> features) const {
  return static_cast<RiskLabel>(argmax_lowest(scores(features)));
}

std::array<double, kNumClasses> AdaBoostModel::scores(
    std::span<const double> features) const {
  std::array<double, kNumClasses> votes{};
  if (stumps.empty()) {
    votes[static_cast<std::size_t>(fallback)] = 1.0;
    return votes;
  }
  double total = 0.0;
  for (std::size_t s = 0; s < stumps.size(); ++s) {
    votes[static_cast<std::size_t>(stumps[s].predict(features))] += alphas[s];
    total += alphas[s];
  }
  if (total > 0.0) {
    for (auto& v : votes) v /= total;
  }
  return votes;
}

void AdaBoostModel::params_to_json(nlohmann::json& out) const {
  nlohmann::json jstumps = nlohmann::json::array();
  for (const Stump& s : stumps) {
    jstumps.push_back({{"feature", s.feature},
                       {"threshold", s.threshold},
                       {"left", static_cast<int>(s.left)},
                       {"right", static_cast<int>(s.right)}});
  }
  out["stumps"] = std::move(jstumps);
  out["alphas"] = alphas;
  out["fallback"] = static_cast<int>(fallback);
}

}  // namespace detail
}  // namespace eegpoison
