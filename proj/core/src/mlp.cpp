#include <algorithm>
#include <cmath>
#include <numeric>

#include "eegpoison/errors.hpp"
#include "eegpoison/rng.hpp"
#include "model_detail.hpp"

namespace eegpoison {

namespace detail {

namespace {

std::size_t layer_count(const MlpModel& m) { return m.dims.size() - 1; }

MlpModel init_mlp(const MlpSpec& spec, std::size_t input_dim) {
  MlpModel model;
  model.input_dim = input_dim;
  model.dims.push_back(input_dim);
  for (const int h : spec.hidden) {
    model.dims.push_back(static_cast<std::size_t>(h));
  }
  model.dims.push_back(kNumClasses);

  Rng rng(Rng::derive(spec.seed, "mlp"));
  for (std::size_t l = 0; l + 1 < model.dims.size(); ++l) {
    const std::size_t fan_in = model.dims[l];
    const std::size_t fan_out = model.dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> w(fan_out * fan_in);
    for (auto& v : w) v = (2.0 * rng.uniform01() - 1.0) * bound;
    model.weights.push_back(std::move(w));
    model.biases.emplace_back(fan_out, 0.0);
  }
  return model;
}

/// One forward pass keeping every activation; acts[0] is the input, the
/// last entry holds softmax probabilities.
void forward_full(const MlpModel& m, std::span<const double> input,
                  std::vector<std::vector<double>>& acts) {
  const std::size_t layers = layer_count(m);
  acts.resize(layers + 1);
  acts[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t out_n = m.dims[l + 1];
    const std::size_t in_n = m.dims[l];
    auto& out = acts[l + 1];
    out.assign(out_n, 0.0);
    const auto& w = m.weights[l];
    for (std::size_t r = 0; r < out_n; ++r) {
      double z = m.biases[l][r];
      const double* row = w.data() + r * in_n;
      for (std::size_t c = 0; c < in_n; ++c) z += row[c] * acts[l][c];
      out[r] = z;
    }
    if (l + 1 < layers) {
      for (auto& v : out) v = v > 0.0 ? v : 0.0;
    } else {
      const double zmax = *std::max_element(out.begin(), out.end());
      double sum = 0.0;
      for (auto& v : out) {
        v = std::exp(v - zmax);
        sum += v;
      }
      for (auto& v : out) v /= sum;
    }
  }
}

double full_loss(const MlpModel& m, const std::vector<Sample>& samples) {
  std::vector<std::vector<double>> acts;
  double loss = 0.0;
  for (const Sample& s : samples) {
    forward_full(m, s.features, acts);
    const double p = acts.back()[static_cast<std::size_t>(s.label)];
    loss -= std::log(std::max(p, 1e-300));
  }
  return loss / static_cast<double>(samples.size());
}

struct Grads {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  explicit Grads(const MlpModel& m) {
    for (std::size_t l = 0; l < layer_count(m); ++l) {
      weights.emplace_back(m.weights[l].size(), 0.0);
      biases.emplace_back(m.biases[l].size(), 0.0);
    }
  }
  void zero() {
    for (auto& g : weights) std::fill(g.begin(), g.end(), 0.0);
    for (auto& g : biases) std::fill(g.begin(), g.end(), 0.0);
  }
};

/// Accumulates d(loss)/d(params) for one sample into `g` (sum, not mean).
void backward_one(const MlpModel& m, const Sample& sample,
                  std::vector<std::vector<double>>& acts, Grads& g) {
  forward_full(m, sample.features, acts);
  const std::size_t layers = layer_count(m);

  std::vector<double> delta = acts[layers];
  delta[static_cast<std::size_t>(sample.label)] -= 1.0;

  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t out_n = m.dims[l + 1];
    const std::size_t in_n = m.dims[l];
    auto& gw = g.weights[l];
    for (std::size_t r = 0; r < out_n; ++r) {
      const double d = delta[r];
      g.biases[l][r] += d;
      double* row = gw.data() + r * in_n;
      for (std::size_t c = 0; c < in_n; ++c) row[c] += d * acts[l][c];
    }
    if (l == 0) break;
    std::vector<double> prev(in_n, 0.0);
    const auto& w = m.weights[l];
    for (std::size_t r = 0; r < out_n; ++r) {
      const double d = delta[r];
      const double* row = w.data() + r * in_n;
      for (std::size_t c = 0; c < in_n; ++c) prev[c] += row[c] * d;
    }
    // ReLU gate: acts[l] > 0 iff the pre-activation was positive.
    for (std::size_t c = 0; c < in_n; ++c) {
      if (acts[l][c] <= 0.0) prev[c] = 0.0;
    }
    delta = std::move(prev);
  }
}

}  // namespace

std::shared_ptr<MlpModel> fit_mlp(const MlpSpec& spec, const Dataset& train,
                                  TrainingSummary& summary,
                                  const FitBudget* budget) {
  auto model = std::make_shared<MlpModel>(init_mlp(spec, train.n_features()));
  const std::size_t n = train.size();

  summary.initial_loss = full_loss(*model, train.samples);
  summary.loss_history.clear();

  Rng rng(Rng::derive(spec.seed, "mlp/order"));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  Grads grads(*model);
  Grads velocity(*model);
  std::vector<std::vector<double>> acts;
  const auto batch = static_cast<std::size_t>(spec.batch_size);

  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    if (budget != nullptr && budget->expired()) {
      throw Error(ErrorKind::Timeout, "mlp fit exceeded budget");
    }
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(start + batch, n);
      grads.zero();
      for (std::size_t i = start; i < stop; ++i) {
        backward_one(*model, train.samples[order[i]], acts, grads);
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t l = 0; l < layer_count(*model); ++l) {
        auto& vels = velocity.weights[l];
        auto& ws = model->weights[l];
        for (std::size_t i = 0; i < ws.size(); ++i) {
          vels[i] = spec.momentum * vels[i] -
                    spec.learning_rate * grads.weights[l][i] * inv;
          ws[i] += vels[i];
        }
        auto& velb = velocity.biases[l];
        auto& bs = model->biases[l];
        for (std::size_t i = 0; i < bs.size(); ++i) {
          velb[i] = spec.momentum * velb[i] -
                    spec.learning_rate * grads.biases[l][i] * inv;
          bs[i] += velb[i];
        }
      }
    }
    summary.loss_history.push_back(full_loss(*model, train.samples));
  }

  summary.final_loss =
      summary.loss_history.empty() ? summary.initial_loss
                                   : summary.loss_history.back();
  summary.rounds_completed = static_cast<int>(summary.loss_history.size());
  return model;
}

std::array<double, kNumClasses> MlpModel::forward_probs(
    std::span<const double> features) const {
  std::vector<std::vector<double>> acts;
  forward_full(*this, features, acts);
  std::array<double, kNumClasses> probs{};
  std::copy_n(acts.back().begin(), kNumClasses, probs.begin());
  return probs;
}

RiskLabel MlpModel::predict_one(std::span<const double> features) const {
  return static_cast<RiskLabel>(argmax_lowest(forward_probs(features)));
}

std::array<double, kNumClasses> MlpModel::scores(
    std::span<const double> features) const {
  return forward_probs(features);
}

void MlpModel::params_to_json(nlohmann::json& out) const {
  out["dims"] = dims;
  out["weights"] = weights;
  out["biases"] = biases;
}

}  // namespace detail

double mlp_gradient_check(const MlpSpec& spec, const Dataset& tiny_train,
                          double epsilon) {
  if (tiny_train.size() == 0) {
    throw Error(ErrorKind::EmptyInput, "gradient check needs samples");
  }
  detail::MlpModel model = detail::init_mlp(spec, tiny_train.n_features());

  detail::Grads analytic(model);
  std::vector<std::vector<double>> acts;
  for (const Sample& s : tiny_train.samples) {
    detail::backward_one(model, s, acts, analytic);
  }
  const double inv = 1.0 / static_cast<double>(tiny_train.size());

  double max_rel = 0.0;
  auto check = [&](double& param, double grad_sum) {
    const double saved = param;
    param = saved + epsilon;
    const double hi = detail::full_loss(model, tiny_train.samples);
    param = saved - epsilon;
    const double lo = detail::full_loss(model, tiny_train.samples);
    param = saved;
    const double numeric = (hi - lo) / (2.0 * epsilon);
    const double a = grad_sum * inv;
    const double rel =
        std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
    max_rel = std::max(max_rel, rel);
  };

  for (std::size_t l = 0; l < detail::layer_count(model); ++l) {
    for (std::size_t i = 0; i < model.weights[l].size(); ++i) {
      check(model.weights[l][i], analytic.weights[l][i]);
    }
    for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
      check(model.biases[l][i], analytic.biases[l][i]);
    }
  }
  return max_rel;
}

double mlp_loss(const TrainedModel& model, const Dataset& ds) {
  if (model.spec().kind() != "mlp") {
    throw Error(ErrorKind::BadConfig, "mlp_loss needs an mlp model");
  }
  if (ds.size() == 0) {
    throw Error(ErrorKind::EmptyInput, "loss of an empty dataset");
  }
  double loss = 0.0;
  for (const Sample& s : ds.samples) {
    const auto probs = model.class_scores(s.features);
    const double p = probs[static_cast<std::size_t>(s.label)];
    loss -= std::log(std::max(p, 1e-300));
  }
  return loss / static_cast<double>(ds.size());
}

}  // namespace eegpoison
