#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "eegpoison/data.hpp"
#include "eegpoison/models.hpp"
#include "json.hpp"

namespace eegpoison {

class Rng;

namespace detail {

/// Internal interface behind TrainedModel. predict_one sees features after
/// the optional scaler has been applied.
class ModelBase {
 public:
  virtual ~ModelBase() = default;
  virtual RiskLabel predict_one(std::span<const double> features) const = 0;
  virtual std::array<double, kNumClasses> scores(
      std::span<const double> features) const = 0;
  virtual void params_to_json(nlohmann::json& out) const = 0;

  std::size_t input_dim = 0;
  std::optional<Scaler> scaler;
};

/// Index of the largest score; ties resolve to the lowest label index
/// (Low < Normal < Medium < High).
std::size_t argmax_lowest(const std::array<double, kNumClasses>& scores);

/// Parses one classifier spec object (already-parsed JSON). Rejects unknown
/// keys and validates the result.
ClassifierSpec classifier_spec_from_json_obj(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// KNN
// ---------------------------------------------------------------------------

class KnnModel : public ModelBase {
 public:
  int k = 5;
  std::vector<std::vector<double>> points;
  std::vector<RiskLabel> labels;

  RiskLabel predict_one(std::span<const double> features) const override;
  std::array<double, kNumClasses> scores(
      std::span<const double> features) const override;
  void params_to_json(nlohmann::json& out) const override;
};

std::shared_ptr<KnnModel> fit_knn(const KnnSpec& spec, const Dataset& train);

// ---------------------------------------------------------------------------
// Decision tree (shared by the forest)
// ---------------------------------------------------------------------------

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  RiskLabel label = RiskLabel::Low;
};

struct Tree {
  std::vector<TreeNode> nodes;

  RiskLabel predict(std::span<const double> features) const;
};

struct TreeParams {
  int max_depth = 0;           // 0 = unlimited
  int min_leaf = 1;
  int features_per_split = 0;  // 0 = all features, in ascending order
};

/// Grows a tree on the referenced samples. Splits minimize the weighted
/// child Gini impurity over midpoints between consecutive distinct values;
/// ties keep the earliest (feature, threshold) candidate. A node becomes a
/// leaf when pure, at the depth limit, or when no sampled feature varies.
Tree build_tree(const std::vector<Sample>& samples,
                std::vector<std::size_t> indices, const TreeParams& params,
                Rng& rng);

class ForestModel : public ModelBase {
 public:
  std::vector<Tree> trees;

  RiskLabel predict_one(std::span<const double> features) const override;
  std::array<double, kNumClasses> scores(
      std::span<const double> features) const override;
  void params_to_json(nlohmann::json& out) const override;
};

std::shared_ptr<ForestModel> fit_random_forest(const RandomForestSpec& spec,
                                               const Dataset& train,
                                               TrainingSummary& summary,
                                               const FitBudget* budget);

// ---------------------------------------------------------------------------
// AdaBoost (multi-class SAMME over depth-1 stumps)
// ---------------------------------------------------------------------------

struct Stump {
  int feature = -1;  // -1 = constant stump, predicts `right`
  double threshold = 0.0;
  RiskLabel left = RiskLabel::Low;   // x[feature] < threshold
  RiskLabel right = RiskLabel::Low;  // otherwise

  RiskLabel predict(std::span<const double> features) const {
    if (feature < 0) return right;
    return features[static_cast<std::size_t>(feature)] < threshold ? left
                                                                   : right;
  }
};

/// Exact weighted 0-1 error minimization: the constant stump is the seed
/// candidate, then every (feature, ascending midpoint) split scanned in
/// feature_order (ascending features when empty); a candidate wins only when
/// its error improves by more than 1e-12, so the unique optimum is
/// order-independent.
Stump best_stump(const std::vector<Sample>& samples,
                 const std::vector<double>& weights,
                 std::span<const int> feature_order = {});

class AdaBoostModel : public ModelBase {
 public:
  std::vector<Stump> stumps;
  std::vector<double> alphas;
  RiskLabel fallback = RiskLabel::Low;  // used when no stump was accepted

  RiskLabel predict_one(std::span<const double> features) const override;
  std::array<double, kNumClasses> scores(
      std::span<const double> features) const override;
  void params_to_json(nlohmann::json& out) const override;
};

std::shared_ptr<AdaBoostModel> fit_adaboost(const AdaBoostSpec& spec,
                                            const Dataset& train,
                                            TrainingSummary& summary,
                                            const FitBudget* budget);

// ---------------------------------------------------------------------------
// MLP
// ---------------------------------------------------------------------------

class MlpModel : public ModelBase {
 public:
  std::vector<std::size_t> dims;          // [input, hidden..., 4]
  std::vector<std::vector<double>> weights;  // row-major, out x in per layer
  std::vector<std::vector<double>> biases;

  RiskLabel predict_one(std::span<const double> features) const override;
  std::array<double, kNumClasses> scores(
      std::span<const double> features) const override;
  void params_to_json(nlohmann::json& out) const override;

  /// Softmax probabilities for one (already scaled) input.
  std::array<double, kNumClasses> forward_probs(
      std::span<const double> features) const;
};

std::shared_ptr<MlpModel> fit_mlp(const MlpSpec& spec, const Dataset& train,
                                  TrainingSummary& summary,
                                  const FitBudget* budget);

}  // namespace detail
}  // namespace eegpoison
