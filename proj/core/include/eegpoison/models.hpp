#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "eegpoison/data.hpp"

namespace eegpoison {

// ---------------------------------------------------------------------------
// Classifier specifications
// ---------------------------------------------------------------------------

struct KnnSpec {
  int k = 5;  // positive odd
  bool scale = true;

  bool operator==(const KnnSpec&) const = default;
};

struct RandomForestSpec {
  int n_trees = 100;
  int max_depth = 0;           // 0 = unlimited
  int min_leaf = 1;
  int features_per_split = 0;  // 0 = floor(sqrt(n_features))
  bool bootstrap = true;
  bool scale = false;
  std::uint64_t seed = 0;

  bool operator==(const RandomForestSpec&) const = default;
};

struct AdaBoostSpec {
  int n_rounds = 50;  // depth-1 stumps, multi-class SAMME
  bool scale = false;
  std::uint64_t seed = 0;

  bool operator==(const AdaBoostSpec&) const = default;
};

struct MlpSpec {
  std::vector<int> hidden = {64, 32};  // input = dataset dim, output = 4
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 32;
  int epochs = 200;
  bool scale = true;
  std::uint64_t seed = 0;

  bool operator==(const MlpSpec&) const = default;
};

class ClassifierSpec {
 public:
  using Variant = std::variant<KnnSpec, RandomForestSpec, AdaBoostSpec, MlpSpec>;

  ClassifierSpec() : value_(KnnSpec{}) {}
  ClassifierSpec(KnnSpec s) : value_(s) {}
  ClassifierSpec(RandomForestSpec s) : value_(s) {}
  ClassifierSpec(AdaBoostSpec s) : value_(s) {}
  ClassifierSpec(MlpSpec s) : value_(std::move(s)) {}

  const Variant& value() const { return value_; }
  Variant& value() { return value_; }

  /// "knn" | "random_forest" | "ada_boost" | "mlp"
  std::string kind() const;

  /// Default spec for a kind tag; throws Error{BadConfig} on unknown tags.
  static ClassifierSpec default_for(std::string_view kind);

  /// RNG seed (0 for KNN, which draws nothing).
  std::uint64_t seed() const;
  void set_seed(std::uint64_t seed);

  /// Positivity and parity checks; throws Error{BadConfig}.
  void validate() const;

  bool operator==(const ClassifierSpec&) const = default;

 private:
  Variant value_;
};

/// Spec <-> JSON. `include_seed=false` yields the seed-free form used for
/// hyperparameter fingerprints and grid configs.
std::string classifier_spec_to_json(const ClassifierSpec& spec,
                                    bool include_seed = true);
ClassifierSpec classifier_spec_from_json(const std::string& text);

/// FNV-1a hash (hex) of the canonical seed-free spec JSON.
std::string spec_fingerprint(const ClassifierSpec& spec);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

/// Cooperative wall-clock cap checked at round/tree/epoch boundaries.
struct FitBudget {
  std::chrono::steady_clock::time_point deadline;

  static FitBudget from_ms(std::int64_t ms) {
    return {std::chrono::steady_clock::now() + std::chrono::milliseconds(ms)};
  }
  bool expired() const {
    return std::chrono::steady_clock::now() >= deadline;
  }
};

struct TrainingSummary {
  int rounds_completed = 0;  // boosting rounds, trees grown, or epochs run
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> loss_history;          // MLP: full-set loss per epoch
  std::vector<double> boost_errors;          // AdaBoost: per-round weighted error
  std::vector<double> boost_alphas;          // AdaBoost: per-round vote weight
  std::vector<double> boost_weight_sums;     // AdaBoost: post-normalization sums
  std::vector<std::size_t> bootstrap_sizes;  // forest: per-tree sample counts
};

namespace detail {
class ModelBase;
}

/// A fitted classifier. Prediction is pure; instances are safe to share
/// across threads.
class TrainedModel {
 public:
  TrainedModel() = default;

  const ClassifierSpec& spec() const { return spec_; }
  const TrainingSummary& summary() const { return summary_; }
  std::size_t input_dim() const;

  RiskLabel predict(std::span<const double> features) const;
  std::vector<RiskLabel> predict(const Dataset& ds) const;

  /// Per-class scores behind predict: softmax probabilities for the MLP,
  /// vote shares for the ensembles, neighbor votes for KNN.
  std::array<double, kNumClasses> class_scores(
      std::span<const double> features) const;

  std::string to_json_string() const;
  static TrainedModel from_json_string(const std::string& text);

 private:
  friend TrainedModel fit(const ClassifierSpec&, const Dataset&,
                          const FitBudget*);

  std::shared_ptr<const detail::ModelBase> impl_;
  ClassifierSpec spec_;
  TrainingSummary summary_;
};

/// Fits `spec` on `train`. Deterministic given (spec, train) including seeds.
/// Throws Error{EmptyTrainingSet} on an empty dataset and Error{Timeout}
/// when `budget` expires.
TrainedModel fit(const ClassifierSpec& spec, const Dataset& train,
                 const FitBudget* budget = nullptr);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Numeric building blocks (exposed for testing and reuse)
// ---------------------------------------------------------------------------

/// 1 - sum((count_i / total)^2). Throws Error{AllZero} when all counts are 0.
double gini_impurity(const std::array<std::int64_t, kNumClasses>& class_counts);

/// SAMME learner weight ln((1-err)/err) + ln(K-1), with err clamped to
/// [1e-10, 1 - 1e-10]. Zero exactly at the chance boundary err = (K-1)/K.
double samme_alpha(double weighted_error, int n_classes = 4);

/// Compares the MLP's analytic cross-entropy gradient against central finite
/// differences over every parameter at the initial weights; returns the
/// maximum relative error. `tiny_train` should hold at most a few samples.
double mlp_gradient_check(const MlpSpec& spec, const Dataset& tiny_train,
                          double epsilon = 1e-5);

/// Full-dataset mean cross-entropy loss of a fitted MLP model.
double mlp_loss(const TrainedModel& model, const Dataset& ds);

}  // namespace eegpoison
