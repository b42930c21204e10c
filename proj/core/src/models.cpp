#include <string>

#include "eegpoison/errors.hpp"
#include "eegpoison/models.hpp"
#include "model_detail.hpp"

namespace eegpoison {

namespace detail {

std::size_t argmax_lowest(const std::array<double, kNumClasses>& scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

}  // namespace detail

std::string ClassifierSpec::kind() const {
  struct Visitor {
    std::string operator()(const KnnSpec&) const { return "knn"; }
    std::string operator()(const RandomForestSpec&) const {
      return "random_forest";
    }
    std::string operator()(const AdaBoostSpec&) const { return "ada_boost"; }
    std::string operator()(const MlpSpec&) const { return "mlp"; }
  };
  return std::visit(Visitor{}, value_);
}

ClassifierSpec ClassifierSpec::default_for(std::string_view kind) {
  if (kind == "knn") return ClassifierSpec(KnnSpec{});
  if (kind == "random_forest") return ClassifierSpec(RandomForestSpec{});
  if (kind == "ada_boost") return ClassifierSpec(AdaBoostSpec{});
  if (kind == "mlp") return ClassifierSpec(MlpSpec{});
  throw Error(ErrorKind::BadConfig,
              "unknown model kind '" + std::string(kind) + "'");
}

std::uint64_t ClassifierSpec::seed() const {
  struct Visitor {
    std::uint64_t operator()(const KnnSpec&) const { return 0; }
    std::uint64_t operator()(const RandomForestSpec& s) const { return s.seed; }
    std::uint64_t operator()(const AdaBoostSpec& s) const { return s.seed; }
    std::uint64_t operator()(const MlpSpec& s) const { return s.seed; }
  };
  return std::visit(Visitor{}, value_);
}

void ClassifierSpec::set_seed(std::uint64_t seed) {
  struct Visitor {
    std::uint64_t seed;
    void operator()(KnnSpec&) const {}
    void operator()(RandomForestSpec& s) const { s.seed = seed; }
    void operator()(AdaBoostSpec& s) const { s.seed = seed; }
    void operator()(MlpSpec& s) const { s.seed = seed; }
  };
  std::visit(Visitor{seed}, value_);
}

void ClassifierSpec::validate() const {
  struct Visitor {
    void operator()(const KnnSpec& s) const {
      if (s.k < 1) throw Error(ErrorKind::BadConfig, "knn k must be positive");
      if (s.k % 2 == 0) throw Error(ErrorKind::BadConfig, "knn k must be odd");
    }
    void operator()(const RandomForestSpec& s) const {
      if (s.n_trees < 1) {
        throw Error(ErrorKind::BadConfig, "n_trees must be positive");
      }
      if (s.max_depth < 0) {
        throw Error(ErrorKind::BadConfig, "max_depth must be >= 0");
      }
      if (s.min_leaf < 1) {
        throw Error(ErrorKind::BadConfig, "min_leaf must be positive");
      }
      if (s.features_per_split < 0) {
        throw Error(ErrorKind::BadConfig, "features_per_split must be >= 0");
      }
    }
    void operator()(const AdaBoostSpec& s) const {
      if (s.n_rounds < 1) {
        throw Error(ErrorKind::BadConfig, "n_rounds must be positive");
      }
    }
    void operator()(const MlpSpec& s) const {
      for (const int h : s.hidden) {
        if (h < 1) {
          throw Error(ErrorKind::BadConfig, "hidden widths must be positive");
        }
      }
      if (s.learning_rate < 0.0) {
        throw Error(ErrorKind::BadConfig, "learning_rate must be >= 0");
      }
      if (s.momentum < 0.0 || s.momentum >= 1.0) {
        throw Error(ErrorKind::BadConfig, "momentum must be in [0, 1)");
      }
      if (s.batch_size < 1) {
        throw Error(ErrorKind::BadConfig, "batch_size must be positive");
      }
      if (s.epochs < 0) {
        throw Error(ErrorKind::BadConfig, "epochs must be >= 0");
      }
    }
  };
  std::visit(Visitor{}, value_);
}

namespace {

bool spec_wants_scaling(const ClassifierSpec& spec) {
  struct Visitor {
    bool operator()(const KnnSpec& s) const { return s.scale; }
    bool operator()(const RandomForestSpec& s) const { return s.scale; }
    bool operator()(const AdaBoostSpec& s) const { return s.scale; }
    bool operator()(const MlpSpec& s) const { return s.scale; }
  };
  return std::visit(Visitor{}, spec.value());
}

}  // namespace

TrainedModel fit(const ClassifierSpec& spec, const Dataset& train,
                 const FitBudget* budget) {
  spec.validate();
  if (train.size() == 0) {
    throw Error(ErrorKind::EmptyTrainingSet, "fit on an empty dataset");
  }
  validate(train);

  std::optional<Scaler> scaler;
  const Dataset* fit_data = &train;
  Dataset scaled;
  if (spec_wants_scaling(spec)) {
    scaler = fit_scaler(train);
    scaled = apply_scaler(*scaler, train);
    fit_data = &scaled;
  }

  TrainedModel model;
  model.spec_ = spec;

  struct Visitor {
    const Dataset& data;
    TrainingSummary& summary;
    const FitBudget* budget;

    std::shared_ptr<detail::ModelBase> operator()(const KnnSpec& s) const {
      return detail::fit_knn(s, data);
    }
    std::shared_ptr<detail::ModelBase> operator()(
        const RandomForestSpec& s) const {
      return detail::fit_random_forest(s, data, summary, budget);
    }
    std::shared_ptr<detail::ModelBase> operator()(const AdaBoostSpec& s) const {
      return detail::fit_adaboost(s, data, summary, budget);
    }
    std::shared_ptr<detail::ModelBase> operator()(const MlpSpec& s) const {
      return detail::fit_mlp(s, data, summary, budget);
    }
  };
  auto impl =
      std::visit(Visitor{*fit_data, model.summary_, budget}, spec.value());
  impl->input_dim = train.n_features();
  impl->scaler = std::move(scaler);
  model.impl_ = std::move(impl);
  return model;
}

std::size_t TrainedModel::input_dim() const {
  return impl_ ? impl_->input_dim : 0;
}

namespace {

const detail::ModelBase& require_impl(
    const std::shared_ptr<const detail::ModelBase>& impl) {
  if (!impl) {
    throw Error(ErrorKind::Internal, "model has not been fitted");
  }
  return *impl;
}

}  // namespace

RiskLabel TrainedModel::predict(std::span<const double> features) const {
  const detail::ModelBase& impl = require_impl(impl_);
  if (features.size() != impl.input_dim) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(impl.input_dim) +
                    " features, got " + std::to_string(features.size()));
  }
  if (impl.scaler) {
    std::vector<double> scaled(features.begin(), features.end());
    apply_scaler_inplace(*impl.scaler, scaled);
    return impl.predict_one(scaled);
  }
  return impl.predict_one(features);
}

std::vector<RiskLabel> TrainedModel::predict(const Dataset& ds) const {
  std::vector<RiskLabel> out;
  out.reserve(ds.size());
  for (const Sample& s : ds.samples) {
    out.push_back(predict(s.features));
  }
  return out;
}

std::array<double, kNumClasses> TrainedModel::class_scores(
    std::span<const double> features) const {
  const detail::ModelBase& impl = require_impl(impl_);
  if (features.size() != impl.input_dim) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(impl.input_dim) +
                    " features, got " + std::to_string(features.size()));
  }
  if (impl.scaler) {
    std::vector<double> scaled(features.begin(), features.end());
    apply_scaler_inplace(*impl.scaler, scaled);
    return impl.scores(scaled);
  }
  return impl.scores(features);
}

}  // namespace eegpoison
