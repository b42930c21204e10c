#include <algorithm>
#include <cmath>
#include <numeric>

#include "eegpoison/errors.hpp"
#include "eegpoison/rng.hpp"
#include "model_detail.hpp"

namespace eegpoison {

double gini_impurity(const std::array<std::int64_t, kNumClasses>& class_counts) {
  std::int64_t total = 0;
  for (const auto c : class_counts) {
    if (c < 0) {
      throw Error(ErrorKind::BadConfig, "negative class count");
    }
    total += c;
  }
  if (total == 0) {
    throw Error(ErrorKind::AllZero, "gini impurity of an empty node");
  }
  double sum_sq = 0.0;
  for (const auto c : class_counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

namespace detail {

namespace {

RiskLabel majority_label(const std::array<std::int64_t, kNumClasses>& counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<RiskLabel>(best);
}

// Weighted child impurity from integer counts:
//   (nl - sum(cl^2)/nl  +  nr - sum(cr^2)/nr) / n
// Kept as one expression so equal-count candidates evaluate bit-identically.
double weighted_child_gini(const std::array<std::int64_t, kNumClasses>& left,
                           std::int64_t nl,
                           const std::array<std::int64_t, kNumClasses>& right,
                           std::int64_t nr) {
  double left_sq = 0.0;
  double right_sq = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    left_sq += static_cast<double>(left[c]) * static_cast<double>(left[c]);
    right_sq += static_cast<double>(right[c]) * static_cast<double>(right[c]);
  }
  const double ln = static_cast<double>(nl);
  const double rn = static_cast<double>(nr);
  return (ln - left_sq / ln + rn - right_sq / rn) / (ln + rn);
}

struct BestSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

}  // namespace

Tree build_tree(const std::vector<Sample>& samples,
                std::vector<std::size_t> indices, const TreeParams& params,
                Rng& rng) {
  Tree tree;
  const std::size_t n_features =
      samples.empty() ? 0 : samples.front().features.size();

  struct Work {
    std::vector<std::size_t> indices;
    int depth;
    int node;
  };

  // Iterative depth-first growth, left child first, matching the recursive
  // order so per-node RNG draws are reproducible.
  std::vector<Work> stack;
  tree.nodes.emplace_back();
  stack.push_back({std::move(indices), 0, 0});

  std::vector<int> all_features(n_features);
  std::iota(all_features.begin(), all_features.end(), 0);

  while (!stack.empty()) {
    Work work = std::move(stack.back());
    stack.pop_back();

    std::array<std::int64_t, kNumClasses> counts{};
    for (const std::size_t idx : work.indices) {
      counts[static_cast<std::size_t>(samples[idx].label)] += 1;
    }
    TreeNode& node = tree.nodes[static_cast<std::size_t>(work.node)];
    node.label = majority_label(counts);

    const bool pure =
        *std::max_element(counts.begin(), counts.end()) ==
        static_cast<std::int64_t>(work.indices.size());
    const bool at_depth_limit =
        params.max_depth > 0 && work.depth >= params.max_depth;
    if (pure || at_depth_limit ||
        work.indices.size() < 2 * static_cast<std::size_t>(params.min_leaf)) {
      continue;  // leaf
    }

    // Candidate features: either all of them or a per-node random subset,
    // scanned in ascending index order.
    std::vector<int> features;
    if (params.features_per_split <= 0 ||
        params.features_per_split >= static_cast<int>(n_features)) {
      features = all_features;
    } else {
      std::vector<int> pool = all_features;
      for (int i = 0; i < params.features_per_split; ++i) {
        const auto j = static_cast<std::size_t>(
            rng.bounded(pool.size() - static_cast<std::size_t>(i)) + i);
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
      }
      features.assign(pool.begin(), pool.begin() + params.features_per_split);
      std::sort(features.begin(), features.end());
    }

    BestSplit best;
    std::vector<std::pair<double, std::size_t>> values(work.indices.size());
    for (const int f : features) {
      for (std::size_t i = 0; i < work.indices.size(); ++i) {
        values[i] = {samples[work.indices[i]].features[static_cast<std::size_t>(f)],
                     work.indices[i]};
      }
      std::sort(values.begin(), values.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::array<std::int64_t, kNumClasses> left{};
      std::array<std::int64_t, kNumClasses> right = counts;
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const auto c = static_cast<std::size_t>(samples[values[i].second].label);
        left[c] += 1;
        right[c] -= 1;
        if (values[i].first == values[i + 1].first) continue;
        const auto nl = static_cast<std::int64_t>(i + 1);
        const auto nr = static_cast<std::int64_t>(values.size() - i - 1);
        if (nl < params.min_leaf || nr < params.min_leaf) continue;
        const double impurity = weighted_child_gini(left, nl, right, nr);
        if (!best.found || impurity < best.impurity) {
          best.found = true;
          best.feature = f;
          best.threshold = values[i].first + (values[i + 1].first - values[i].first) / 2.0;
          best.impurity = impurity;
        }
      }
    }

    if (!best.found) continue;  // nothing varies among the sampled features

    std::vector<std::size_t> left_idx;
    std::vector<std::size_t> right_idx;
    for (const std::size_t idx : work.indices) {
      const double v = samples[idx].features[static_cast<std::size_t>(best.feature)];
      (v < best.threshold ? left_idx : right_idx).push_back(idx);
    }

    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = static_cast<int>(tree.nodes.size());
    node.right = node.left + 1;
    const int left_node = node.left;
    const int right_node = node.right;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    // Push right first so the left child is processed (and draws RNG) first.
    stack.push_back({std::move(right_idx), work.depth + 1, right_node});
    stack.push_back({std::move(left_idx), work.depth + 1, left_node});
  }
  return tree;
}

RiskLabel Tree::predict(std::span<const double> features) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& cur = nodes[static_cast<std::size_t>(node)];
    node = features[static_cast<std::size_t>(cur.feature)] < cur.threshold
               ? cur.left
               : cur.right;
  }
  return nodes[static_cast<std::size_t>(node)].label;
}

}  // namespace detail
}  // namespace eegpoison
