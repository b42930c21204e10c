#include <cmath>
#include <numeric>

#include "eegpoison/errors.hpp"
#include "eegpoison/rng.hpp"
#include "model_detail.hpp"

namespace eegpoison::detail {

std::shared_ptr<ForestModel> fit_random_forest(const RandomForestSpec& spec,
                                               const Dataset& train,
                                               TrainingSummary& summary,
                                               const FitBudget* budget) {
  const std::size_t n = train.size();
  const std::size_t d = train.n_features();

  TreeParams params;
  params.max_depth = spec.max_depth;
  params.min_leaf = spec.min_leaf;
  params.features_per_split = spec.features_per_split;
  if (params.features_per_split == 0) {
    // auto: floor(sqrt(d)), at least 1
    params.features_per_split =
        std::max(1, static_cast<int>(std::sqrt(static_cast<double>(d))));
  }
  if (params.features_per_split >= static_cast<int>(d)) {
    params.features_per_split = 0;  // all features, no draws needed
  }

  auto model = std::make_shared<ForestModel>();
  model->trees.reserve(static_cast<std::size_t>(spec.n_trees));
  summary.bootstrap_sizes.clear();

  for (int t = 0; t < spec.n_trees; ++t) {
    if (budget != nullptr && budget->expired()) {
      throw Error(ErrorKind::Timeout, "random forest fit exceeded budget");
    }
    // One independent substream per tree; parallel construction would give
    // bit-identical trees.
    Rng rng(Rng::derive(spec.seed, "tree/" + std::to_string(t)));

    std::vector<std::size_t> indices(n);
    if (spec.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) {
        indices[i] = static_cast<std::size_t>(rng.bounded(n));
      }
    } else {
      std::iota(indices.begin(), indices.end(), std::size_t{0});
    }
    summary.bootstrap_sizes.push_back(indices.size());

    model->trees.push_back(
        build_tree(train.samples, std::move(indices), params, rng));
  }
  summary.rounds_completed = static_cast<int>(model->trees.size());
  return model;
}

RiskLabel ForestModel::predict_one(std::span<const double> features) const {
  return static_cast<RiskLabel>(argmax_lowest(scores(features)));
}

std::array<double, kNumClasses> ForestModel::scores(
    std::span<const double> features) const {
  std::array<double, kNumClasses> votes{};
  for (const Tree& tree : trees) {
    votes[static_cast<std::size_t>(tree.predict(features))] += 1.0;
  }
  if (!trees.empty()) {
    for (auto& v : votes) v /= static_cast<double>(trees.size());
  }
  return votes;
}

void ForestModel::params_to_json(nlohmann::json& out) const {
  nlohmann::json jtrees = nlohmann::json::array();
  for (const Tree& tree : trees) {
    nlohmann::json jnodes = nlohmann::json::array();
    for (const TreeNode& node : tree.nodes) {
      jnodes.push_back({{"feature", node.feature},
                        {"threshold", node.threshold},
                        {"left", node.left},
                        {"right", node.right},
                        {"label", static_cast<int>(node.label)}});
    }
    jtrees.push_back(std::move(jnodes));
  }
  out["trees"] = std::move(jtrees);
}

}  // namespace eegpoison::detail
