#include <cstdint>
#include <fstream>
#include <sstream>

#include "eegpoison/errors.hpp"
#include "eegpoison/models.hpp"
#include "json.hpp"
#include "model_detail.hpp"

namespace eegpoison {

namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

json spec_to_json_obj(const ClassifierSpec& spec, bool include_seed) {
  json j;
  j["kind"] = spec.kind();
  struct Visitor {
    json& j;
    bool include_seed;

    void operator()(const KnnSpec& s) const {
      j["k"] = s.k;
      j["scale"] = s.scale;
    }
    void operator()(const RandomForestSpec& s) const {
      j["n_trees"] = s.n_trees;
      j["max_depth"] = s.max_depth;
      j["min_leaf"] = s.min_leaf;
      j["features_per_split"] = s.features_per_split;
      j["bootstrap"] = s.bootstrap;
      j["scale"] = s.scale;
      if (include_seed) j["seed"] = s.seed;
    }
    void operator()(const AdaBoostSpec& s) const {
      j["n_rounds"] = s.n_rounds;
      j["scale"] = s.scale;
      if (include_seed) j["seed"] = s.seed;
    }
    void operator()(const MlpSpec& s) const {
      j["hidden"] = s.hidden;
      j["learning_rate"] = s.learning_rate;
      j["momentum"] = s.momentum;
      j["batch_size"] = s.batch_size;
      j["epochs"] = s.epochs;
      j["scale"] = s.scale;
      if (include_seed) j["seed"] = s.seed;
    }
  };
  std::visit(Visitor{j, include_seed}, spec.value());
  return j;
}

[[noreturn]] void bad_field(const std::string& key, const char* what) {
  throw Error(ErrorKind::BadConfig,
              "model spec field '" + key + "' " + what);
}

template <typename T>
T get_field(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad_field(key, "is missing or has the wrong type");
  }
}

}  // namespace

namespace detail {

ClassifierSpec classifier_spec_from_json_obj(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorKind::BadConfig, "model spec must be a JSON object");
  }
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw Error(ErrorKind::BadConfig, "model spec needs a string 'kind'");
  }
  const auto kind = j.at("kind").get<std::string>();
  ClassifierSpec spec = ClassifierSpec::default_for(kind);

  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = key == "kind";
    if (kind == "knn") {
      known = known || key == "k" || key == "scale";
    } else if (kind == "random_forest") {
      known = known || key == "n_trees" || key == "max_depth" ||
              key == "min_leaf" || key == "features_per_split" ||
              key == "bootstrap" || key == "scale" || key == "seed";
    } else if (kind == "ada_boost") {
      known = known || key == "n_rounds" || key == "scale" || key == "seed";
    } else if (kind == "mlp") {
      known = known || key == "hidden" || key == "learning_rate" ||
              key == "momentum" || key == "batch_size" || key == "epochs" ||
              key == "scale" || key == "seed";
    }
    if (!known) {
      throw Error(ErrorKind::BadConfig,
                  "unknown key '" + key + "' in " + kind + " spec");
    }
  }

  struct Loader {
    const json& j;

    void operator()(KnnSpec& s) const {
      if (j.contains("k")) s.k = get_field<int>(j, "k");
      if (j.contains("scale")) s.scale = get_field<bool>(j, "scale");
    }
    void operator()(RandomForestSpec& s) const {
      if (j.contains("n_trees")) s.n_trees = get_field<int>(j, "n_trees");
      if (j.contains("max_depth")) s.max_depth = get_field<int>(j, "max_depth");
      if (j.contains("min_leaf")) s.min_leaf = get_field<int>(j, "min_leaf");
      if (j.contains("features_per_split")) {
        s.features_per_split = get_field<int>(j, "features_per_split");
      }
      if (j.contains("bootstrap")) s.bootstrap = get_field<bool>(j, "bootstrap");
      if (j.contains("scale")) s.scale = get_field<bool>(j, "scale");
      if (j.contains("seed")) s.seed = get_field<std::uint64_t>(j, "seed");
    }
    void operator()(AdaBoostSpec& s) const {
      if (j.contains("n_rounds")) s.n_rounds = get_field<int>(j, "n_rounds");
      if (j.contains("scale")) s.scale = get_field<bool>(j, "scale");
      if (j.contains("seed")) s.seed = get_field<std::uint64_t>(j, "seed");
    }
    void operator()(MlpSpec& s) const {
      if (j.contains("hidden")) {
        s.hidden = get_field<std::vector<int>>(j, "hidden");
      }
      if (j.contains("learning_rate")) {
        s.learning_rate = get_field<double>(j, "learning_rate");
      }
      if (j.contains("momentum")) s.momentum = get_field<double>(j, "momentum");
      if (j.contains("batch_size")) {
        s.batch_size = get_field<int>(j, "batch_size");
      }
      if (j.contains("epochs")) s.epochs = get_field<int>(j, "epochs");
      if (j.contains("scale")) s.scale = get_field<bool>(j, "scale");
      if (j.contains("seed")) s.seed = get_field<std::uint64_t>(j, "seed");
    }
  };
  std::visit(Loader{j}, spec.value());
  spec.validate();
  return spec;
}

}  // namespace detail

std::string classifier_spec_to_json(const ClassifierSpec& spec,
                                    bool include_seed) {
  return spec_to_json_obj(spec, include_seed).dump();
}

ClassifierSpec classifier_spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadConfig,
                std::string("model spec is not valid JSON: ") + e.what());
  }
  return detail::classifier_spec_from_json_obj(j);
}

std::string spec_fingerprint(const ClassifierSpec& spec) {
  return to_hex(fnv1a(classifier_spec_to_json(spec, false)));
}

// ---------------------------------------------------------------------------
// TrainedModel serialization
// ---------------------------------------------------------------------------

namespace {

json summary_to_json(const TrainingSummary& s) {
  json j;
  j["rounds_completed"] = s.rounds_completed;
  j["initial_loss"] = s.initial_loss;
  j["final_loss"] = s.final_loss;
  j["loss_history"] = s.loss_history;
  j["boost_errors"] = s.boost_errors;
  j["boost_alphas"] = s.boost_alphas;
  j["boost_weight_sums"] = s.boost_weight_sums;
  j["bootstrap_sizes"] = s.bootstrap_sizes;
  return j;
}

TrainingSummary summary_from_json(const json& j) {
  TrainingSummary s;
  s.rounds_completed = j.value("rounds_completed", 0);
  s.initial_loss = j.value("initial_loss", 0.0);
  s.final_loss = j.value("final_loss", 0.0);
  if (j.contains("loss_history")) {
    s.loss_history = j.at("loss_history").get<std::vector<double>>();
  }
  if (j.contains("boost_errors")) {
    s.boost_errors = j.at("boost_errors").get<std::vector<double>>();
  }
  if (j.contains("boost_alphas")) {
    s.boost_alphas = j.at("boost_alphas").get<std::vector<double>>();
  }
  if (j.contains("boost_weight_sums")) {
    s.boost_weight_sums = j.at("boost_weight_sums").get<std::vector<double>>();
  }
  if (j.contains("bootstrap_sizes")) {
    s.bootstrap_sizes = j.at("bootstrap_sizes").get<std::vector<std::size_t>>();
  }
  return s;
}

RiskLabel label_from_int(int v) {
  if (v < 0 || v >= static_cast<int>(kNumClasses)) {
    throw Error(ErrorKind::BadConfig, "label index out of range in model file");
  }
  return static_cast<RiskLabel>(v);
}

std::shared_ptr<detail::ModelBase> params_from_json(const std::string& kind,
                                                    const json& params) {
  if (kind == "knn") {
    auto m = std::make_shared<detail::KnnModel>();
    m->k = get_field<int>(params, "k");
    m->points = get_field<std::vector<std::vector<double>>>(params, "points");
    for (const auto& entry : params.at("labels")) {
      m->labels.push_back(parse_risk_label(entry.get<std::string>()));
    }
    if (m->points.size() != m->labels.size()) {
      throw Error(ErrorKind::BadConfig, "knn points/labels length mismatch");
    }
    return m;
  }
  if (kind == "random_forest") {
    auto m = std::make_shared<detail::ForestModel>();
    for (const auto& jtree : params.at("trees")) {
      detail::Tree tree;
      for (const auto& jnode : jtree) {
        detail::TreeNode node;
        node.feature = get_field<int>(jnode, "feature");
        node.threshold = get_field<double>(jnode, "threshold");
        node.left = get_field<int>(jnode, "left");
        node.right = get_field<int>(jnode, "right");
        node.label = label_from_int(get_field<int>(jnode, "label"));
        tree.nodes.push_back(node);
      }
      if (tree.nodes.empty()) {
        throw Error(ErrorKind::BadConfig, "empty tree in model file");
      }
      m->trees.push_back(std::move(tree));
    }
    return m;
  }
  if (kind == "ada_boost") {
    auto m = std::make_shared<detail::AdaBoostModel>();
    for (const auto& jstump : params.at("stumps")) {
      detail::Stump s;
      s.feature = get_field<int>(jstump, "feature");
      s.threshold = get_field<double>(jstump, "threshold");
      s.left = label_from_int(get_field<int>(jstump, "left"));
      s.right = label_from_int(get_field<int>(jstump, "right"));
      m->stumps.push_back(s);
    }
    m->alphas = get_field<std::vector<double>>(params, "alphas");
    m->fallback = label_from_int(get_field<int>(params, "fallback"));
    if (m->alphas.size() != m->stumps.size()) {
      throw Error(ErrorKind::BadConfig, "stump/alpha length mismatch");
    }
    return m;
  }
  if (kind == "mlp") {
    auto m = std::make_shared<detail::MlpModel>();
    m->dims = get_field<std::vector<std::size_t>>(params, "dims");
    m->weights = get_field<std::vector<std::vector<double>>>(params, "weights");
    m->biases = get_field<std::vector<std::vector<double>>>(params, "biases");
    if (m->dims.size() < 2 || m->weights.size() != m->dims.size() - 1 ||
        m->biases.size() != m->weights.size()) {
      throw Error(ErrorKind::BadConfig, "inconsistent mlp layer shapes");
    }
    for (std::size_t l = 0; l + 1 < m->dims.size(); ++l) {
      if (m->weights[l].size() != m->dims[l + 1] * m->dims[l] ||
          m->biases[l].size() != m->dims[l + 1]) {
        throw Error(ErrorKind::BadConfig, "inconsistent mlp layer shapes");
      }
    }
    return m;
  }
  throw Error(ErrorKind::BadConfig, "unknown model kind '" + kind + "'");
}

}  // namespace

std::string TrainedModel::to_json_string() const {
  if (!impl_) {
    throw Error(ErrorKind::Internal, "cannot serialize an unfitted model");
  }
  json j;
  j["format_version"] = kModelFormatVersion;
  j["spec"] = spec_to_json_obj(spec_, true);
  j["summary"] = summary_to_json(summary_);

  json params;
  params["input_dim"] = impl_->input_dim;
  impl_->params_to_json(params);
  if (impl_->scaler) {
    params["scaler"] = {{"mean", impl_->scaler->mean},
                        {"stdev", impl_->scaler->stdev}};
  } else {
    params["scaler"] = nullptr;
  }
  j["params"] = std::move(params);
  return j.dump();
}

TrainedModel TrainedModel::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadConfig,
                std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format_version")) {
    throw Error(ErrorKind::BadConfig, "model file lacks a format_version");
  }
  if (j.at("format_version") != kModelFormatVersion) {
    throw Error(ErrorKind::BadConfig, "unsupported model format_version");
  }

  TrainedModel model;
  try {
    model.spec_ = detail::classifier_spec_from_json_obj(j.at("spec"));
    model.summary_ = summary_from_json(j.value("summary", json::object()));
    const json& params = j.at("params");
    auto impl = params_from_json(model.spec_.kind(), params);
    impl->input_dim = get_field<std::size_t>(params, "input_dim");
    if (params.contains("scaler") && !params.at("scaler").is_null()) {
      Scaler scaler;
      scaler.mean = get_field<std::vector<double>>(params.at("scaler"), "mean");
      scaler.stdev =
          get_field<std::vector<double>>(params.at("scaler"), "stdev");
      impl->scaler = std::move(scaler);
    }
    model.impl_ = std::move(impl);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadConfig,
                std::string("malformed model file: ") + e.what());
  }
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for write");
  }
  out << model.to_json_string() << '\n';
  if (!out.flush()) {
    throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
  }
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return TrainedModel::from_json_string(buf.str());
}

}  // namespace eegpoison
