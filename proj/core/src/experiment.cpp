#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include "eegpoison/errors.hpp"
#include "eegpoison/experiment.hpp"
#include "eegpoison/metrics.hpp"
#include "eegpoison/rng.hpp"
#include "json.hpp"
#include "model_detail.hpp"

namespace eegpoison {

namespace {

using nlohmann::json;

[[noreturn]] void bad_config(const std::string& what) {
  throw Error(ErrorKind::BadConfig, what);
}

void reject_unknown_keys(const json& j, const char* where,
                         std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      bad_config("unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (data.csv_path.has_value() == data.synth.has_value()) {
    bad_config("config needs exactly one data source (csv or synth)");
  }
  if (data.synth) {
    if (data.synth->per_class_count == 0) {
      bad_config("synth per_class_count must be positive");
    }
    if (!(data.synth->separation >= 0.0)) {
      bad_config("synth separation must be >= 0");
    }
  }
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
    bad_config("train_fraction must be in (0, 1)");
  }
  if (models.empty()) bad_config("config needs at least one model");
  std::set<std::string> kinds;
  for (const auto& m : models) {
    m.validate();
    if (!kinds.insert(m.kind()).second) {
      bad_config("duplicate model kind '" + m.kind() + "' in grid");
    }
  }
  if (rates.empty()) bad_config("config needs at least one rate");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] >= 0.0) || !(rates[i] <= 1.0)) {
      bad_config("rates must be in [0, 1]");
    }
    if (i > 0 && !(rates[i] > rates[i - 1])) {
      bad_config("rates must be strictly increasing");
    }
  }
  if (scenarios.empty()) bad_config("config needs at least one scenario");
  std::set<std::string> tags;
  for (const auto& s : scenarios) {
    if (!tags.insert(s.tag()).second) {
      bad_config("duplicate scenario '" + s.tag() + "'");
    }
  }
  if (seeds.empty()) bad_config("config needs at least one seed");
  std::set<std::uint64_t> seen_seeds;
  for (const auto s : seeds) {
    if (!seen_seeds.insert(s).second) bad_config("duplicate seed");
  }
  if (cell_budget_ms <= 0) bad_config("cell_budget_ms must be positive");
  if (out_dir.empty()) bad_config("out_dir must not be empty");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    bad_config(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad_config("config must be a JSON object");
  reject_unknown_keys(j, "config",
                      {"data", "train_fraction", "scenarios", "rates",
                       "models", "seeds", "out_dir", "cell_budget_ms",
                       "record_durations"});

  ExperimentConfig config;
  try {
    if (!j.contains("data") || !j.at("data").is_object()) {
      bad_config("config needs a 'data' object");
    }
    const json& jd = j.at("data");
    reject_unknown_keys(jd, "data", {"csv", "synth"});
    if (jd.contains("csv")) {
      config.data.csv_path = jd.at("csv").get<std::string>();
    }
    if (jd.contains("synth")) {
      const json& js = jd.at("synth");
      reject_unknown_keys(js, "data.synth",
                          {"per_class_count", "separation", "seed"});
      SynthSpec synth;
      synth.per_class_count =
          js.value("per_class_count", synth.per_class_count);
      synth.separation = js.value("separation", synth.separation);
      synth.seed = js.value("seed", synth.seed);
      config.data.synth = synth;
    }

    config.train_fraction = j.value("train_fraction", config.train_fraction);
    if (j.contains("scenarios")) {
      config.scenarios.clear();
      for (const auto& entry : j.at("scenarios")) {
        config.scenarios.push_back(
            PoisonScenario::parse(entry.get<std::string>()));
      }
    }
    if (j.contains("rates")) {
      config.rates = j.at("rates").get<std::vector<double>>();
    }
    if (j.contains("models")) {
      config.models.clear();
      for (const auto& jm : j.at("models")) {
        if (jm.is_object() && jm.contains("seed")) {
          bad_config("model specs in a grid must not carry a seed; "
                     "cell seeds are derived from the grid seeds");
        }
        config.models.push_back(detail::classifier_spec_from_json_obj(jm));
      }
    }
    if (j.contains("seeds")) {
      config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    }
    if (j.contains("out_dir")) {
      config.out_dir = j.at("out_dir").get<std::string>();
    }
    config.cell_budget_ms = j.value("cell_budget_ms", config.cell_budget_ms);
    config.record_durations =
        j.value("record_durations", config.record_durations);
  } catch (const json::exception& e) {
    bad_config(std::string("malformed config: ") + e.what());
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::BadConfig,
                "cannot open config '" + path.string() + "'");
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string apply_config_override(const std::string& json_text,
                                  const std::string& key,
                                  const std::string& value) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    bad_config(std::string("config is not valid JSON: ") + e.what());
  }
  if (key.empty()) bad_config("override key must not be empty");

  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    if (dot == std::string::npos) {
      parts.push_back(key.substr(start));
      break;
    }
    parts.push_back(key.substr(start, dot - start));
    start = dot + 1;
  }
  for (const auto& p : parts) {
    if (p.empty()) bad_config("override key has an empty path segment");
  }

  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;

  json* cursor = &j;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!cursor->is_object()) {
      bad_config("override path '" + key + "' crosses a non-object");
    }
    cursor = &(*cursor)[parts[i]];
    if (cursor->is_null()) *cursor = json::object();
  }
  if (!cursor->is_object()) {
    bad_config("override path '" + key + "' crosses a non-object");
  }
  (*cursor)[parts.back()] = std::move(parsed);
  return j.dump(2) + "\n";
}

const char* to_string(CellStatus status) {
  switch (status) {
    case CellStatus::Ok: return "ok";
    case CellStatus::Failed: return "failed";
    case CellStatus::TimedOut: return "timed_out";
  }
  return "failed";
}

CellResult run_cell(const Dataset& train, const Dataset& test,
                    const ClassifierSpec& model_spec,
                    const PoisonSpec& poison_spec, const FitBudget* budget) {
  CellResult cell;
  cell.model_tag = model_spec.kind();
  cell.scenario_tag =
      poison_spec.rate > 0.0 ? poison_spec.scenario.tag() : "none";
  cell.rate = poison_spec.rate;
  cell.seed = poison_spec.seed;
  cell.fingerprint = spec_fingerprint(model_spec);
  cell.spec_json = classifier_spec_to_json(model_spec, true);

  const auto started = std::chrono::steady_clock::now();
  try {
    auto [poisoned, log] = apply_poison(train, poison_spec);
    cell.flips_requested = log.requested_count;
    cell.flips_actual = log.actual_count();
    cell.clamped = log.clamped;

    const TrainedModel model = fit(model_spec, poisoned, budget);

    std::vector<RiskLabel> truth;
    truth.reserve(test.size());
    for (const Sample& s : test.samples) truth.push_back(s.label);
    cell.confusion = confusion(truth, model.predict(test));
    cell.metrics = summarize(cell.confusion);
    cell.status = CellStatus::Ok;
  } catch (const Error& e) {
    cell.status = e.kind() == ErrorKind::Timeout ? CellStatus::TimedOut
                                                 : CellStatus::Failed;
    cell.error = e.what();
  } catch (const std::exception& e) {
    cell.status = CellStatus::Failed;
    cell.error = e.what();
  }
  cell.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
  return cell;
}

namespace {

struct CellTask {
  std::size_t split_index = 0;
  ClassifierSpec model_spec;  // seed already derived for this cell
  PoisonSpec poison;

  std::tuple<std::string, std::string, double, std::uint64_t> key() const {
    return {model_spec.kind(),
            poison.rate > 0.0 ? poison.scenario.tag() : "none", poison.rate,
            poison.seed};
  }
};

}  // namespace

std::vector<CellResult> run_grid(const ExperimentConfig& config,
                                 const RunOptions& options) {
  config.validate();

  const Dataset full = config.data.csv_path ? load_csv(*config.data.csv_path)
                                            : synthesize(*config.data.synth);

  std::vector<SplitResult> splits;
  std::vector<std::uint64_t> test_hashes;
  splits.reserve(config.seeds.size());
  for (const auto seed : config.seeds) {
    splits.push_back(stratified_split(full, config.train_fraction, seed));
    test_hashes.push_back(dataset_fingerprint(splits.back().test));
  }

  std::vector<CellTask> tasks;
  for (const auto& model : config.models) {
    for (std::size_t si = 0; si < config.seeds.size(); ++si) {
      const std::uint64_t seed = config.seeds[si];
      const std::uint64_t model_seed =
          Rng::derive(seed, "model/" + model.kind());
      ClassifierSpec cell_spec = model;
      cell_spec.set_seed(model_seed);

      for (const double rate : config.rates) {
        if (rate == 0.0) {
          CellTask task;
          task.split_index = si;
          task.model_spec = cell_spec;
          task.poison = PoisonSpec{PoisonScenario::to_target(), 0.0, seed};
          tasks.push_back(std::move(task));
          continue;
        }
        for (const auto& scenario : config.scenarios) {
          CellTask task;
          task.split_index = si;
          task.model_spec = cell_spec;
          task.poison = PoisonSpec{scenario, rate, seed};
          tasks.push_back(std::move(task));
        }
      }
    }
  }
  std::sort(tasks.begin(), tasks.end(),
            [](const CellTask& a, const CellTask& b) { return a.key() < b.key(); });

  std::vector<CellResult> cells(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const CellTask& task = tasks[i];
      const SplitResult& split = splits[task.split_index];
      const FitBudget budget = FitBudget::from_ms(config.cell_budget_ms);
      cells[i] = run_cell(split.train, split.test, task.model_spec,
                          task.poison, &budget);
      const std::size_t finished = done.fetch_add(1) + 1;
      if (options.progress) {
        const std::lock_guard<std::mutex> lock(progress_mutex);
        options.progress(cells[i], finished, tasks.size());
      }
    }
  };

  const int n_workers = std::max(
      1, std::min<int>(options.workers, static_cast<int>(tasks.size())));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  for (std::size_t si = 0; si < splits.size(); ++si) {
    if (dataset_fingerprint(splits[si].test) != test_hashes[si]) {
      throw Error(ErrorKind::Internal, "test set mutated during the grid run");
    }
  }

  std::filesystem::create_directories(config.out_dir);
  {
    std::ofstream out(config.out_dir / "results.csv", std::ios::binary);
    if (!out) {
      throw Error(ErrorKind::Io, "cannot write results.csv");
    }
    out << results_to_csv(cells, config.record_durations);
  }
  {
    std::ofstream out(config.out_dir / "results.json", std::ios::binary);
    if (!out) {
      throw Error(ErrorKind::Io, "cannot write results.json");
    }
    out << results_to_json(cells, config.record_durations);
  }
  return cells;
}

std::string results_to_csv(const std::vector<CellResult>& cells,
                           bool record_durations) {
  std::string out = kResultsCsvHeader;
  out += '\n';
  for (const CellResult& cell : cells) {
    out += cell.model_tag;
    out += ',';
    out += cell.scenario_tag;
    out += ',';
    out += format_double(cell.rate);
    out += ',';
    out += std::to_string(cell.seed);
    out += ',';
    out += format_percent(cell.metrics.accuracy, 4);
    out += ',';
    out += format_percent(cell.metrics.macro_recall, 4);
    out += ',';
    out += format_percent(cell.metrics.macro_precision, 4);
    out += ',';
    out += format_percent(cell.metrics.macro_f1, 4);
    out += ',';
    out += std::to_string(cell.flips_actual);
    out += ',';
    out += cell.clamped ? "true" : "false";
    out += ',';
    out += std::to_string(record_durations ? cell.duration_ms : 0);
    out += ',';
    out += to_string(cell.status);
    out += '\n';
  }
  return out;
}

std::string results_to_json(const std::vector<CellResult>& cells,
                            bool record_durations) {
  json rows = json::array();
  for (const CellResult& cell : cells) {
    json row;
    row["model"] = cell.model_tag;
    row["scenario"] = cell.scenario_tag;
    row["rate"] = cell.rate;
    row["seed"] = cell.seed;
    row["status"] = to_string(cell.status);
    row["error"] = cell.error;
    row["accuracy"] = cell.metrics.accuracy;
    row["macro_recall"] = cell.metrics.macro_recall;
    row["macro_precision"] = cell.metrics.macro_precision;
    row["macro_f1"] = cell.metrics.macro_f1;
    row["n_evaluated"] = cell.metrics.n_evaluated;
    json cm = json::array();
    for (const auto& r : cell.confusion.counts) {
      cm.push_back(r);
    }
    row["confusion"] = std::move(cm);
    row["flips_requested"] = cell.flips_requested;
    row["flips_actual"] = cell.flips_actual;
    row["clamped"] = cell.clamped;
    row["duration_ms"] = record_durations ? cell.duration_ms : 0;
    row["hyperparameter_fingerprint"] = cell.fingerprint;
    row["spec"] = json::parse(cell.spec_json);
    rows.push_back(std::move(row));
  }
  json doc;
  doc["cells"] = std::move(rows);
  return doc.dump(2) + "\n";
}

}  // namespace eegpoison
