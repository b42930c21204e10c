#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eegpoison/data.hpp"
#include "eegpoison/errors.hpp"
#include "eegpoison/experiment.hpp"
#include "eegpoison/metrics.hpp"
#include "eegpoison/models.hpp"
#include "eegpoison/poison.hpp"
#include "eegpoison/report.hpp"

namespace {

namespace fs = std::filesystem;
using namespace eegpoison;

struct KeyValue {
  std::string key;
  std::string value;
};

std::vector<KeyValue> parse_overrides(const std::vector<std::string>& raw) {
  std::vector<KeyValue> out;
  for (const std::string& entry : raw) {
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::BadFlag,
                  "--set expects KEY=VALUE, got '" + entry + "'");
    }
    out.push_back({entry.substr(0, eq), entry.substr(eq + 1)});
  }
  return out;
}

std::string read_text_file(const fs::path& path, ErrorKind missing_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(missing_kind, "cannot open '" + path.string() + "'");
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return text;
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  }
  out << text;
  if (!out.flush()) {
    throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
  }
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::size_t per_class = 100;
  double separation = 6.0;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& args) {
  SynthSpec spec;
  spec.per_class_count = args.per_class;
  spec.separation = args.separation;
  spec.seed = args.seed;
  const Dataset ds = synthesize(spec);
  save_csv(ds, args.out);
  std::cout << "synth: wrote " << ds.size() << " samples ("
            << args.per_class << " per class) to " << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

struct SplitArgs {
  std::string in;
  std::string train_out;
  std::string test_out;
  double fraction = 0.8;
  std::uint64_t seed = 0;
};

int cmd_split(const SplitArgs& args) {
  const Dataset ds = load_csv(args.in);
  const SplitResult split = stratified_split(ds, args.fraction, args.seed);
  save_csv(split.train, args.train_out);
  save_csv(split.test, args.test_out);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::cerr << to_string(static_cast<RiskLabel>(c)) << ": train "
              << split.train_counts[c] << ", test " << split.test_counts[c]
              << "\n";
  }
  std::cout << "split: train " << split.train.size() << " -> "
            << args.train_out << ", test " << split.test.size() << " -> "
            << args.test_out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// poison
// ---------------------------------------------------------------------------

struct PoisonArgs {
  std::string in;
  std::string out;
  std::string scenario;
  double rate = 0.0;
  std::uint64_t seed = 0;
};

int cmd_poison(const PoisonArgs& args) {
  const Dataset ds = load_csv(args.in);
  PoisonSpec spec;
  spec.scenario = PoisonScenario::parse(args.scenario);
  spec.rate = args.rate;
  spec.seed = args.seed;

  const auto [poisoned, log] = apply_poison(ds, spec);
  save_csv(poisoned, args.out);

  const fs::path out_path(args.out);
  fs::path log_path = out_path;
  log_path.replace_extension();
  log_path += ".fliplog.csv";
  write_text_file(log_path, fliplog_to_csv(log));

  std::cerr << fliplog_summary_json(log, spec);
  std::cout << "poison: requested " << log.requested_count << ", flipped "
            << log.actual_count() << (log.clamped ? " (clamped)" : "")
            << ", wrote " << args.out << " and " << log_path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string in;
  std::string model_kind;
  std::string out;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::int64_t budget_ms = 120000;
};

int cmd_train(const TrainArgs& args) {
  const Dataset train = load_csv(args.in);

  ClassifierSpec spec = ClassifierSpec::default_for(args.model_kind);
  spec.set_seed(args.seed);
  std::string spec_json = classifier_spec_to_json(spec, true);
  for (const KeyValue& kv : parse_overrides(args.overrides)) {
    spec_json = apply_config_override(spec_json, kv.key, kv.value);
  }
  spec = classifier_spec_from_json(spec_json);

  const FitBudget budget = FitBudget::from_ms(args.budget_ms);
  const auto started = std::chrono::steady_clock::now();
  const TrainedModel model = fit(spec, train, &budget);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - started)
                      .count();
  save_model(model, args.out);
  std::cout << "train: " << spec.kind() << " fitted on " << train.size()
            << " samples in " << ms << " ms, wrote " << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string in;
  std::string out;  // optional metrics JSON
};

int cmd_eval(const EvalArgs& args) {
  const TrainedModel model = load_model(args.model);
  const Dataset test = load_csv(args.in);

  std::vector<RiskLabel> truth;
  truth.reserve(test.size());
  for (const Sample& s : test.samples) truth.push_back(s.label);
  const ConfusionMatrix cm = confusion(truth, model.predict(test));
  const MetricsReport report = summarize(cm);

  if (!args.out.empty()) {
    write_text_file(args.out, metrics_to_json(report, cm));
  }
  std::cout << "eval: accuracy " << format_percent(report.accuracy, 4)
            << "%, macro recall " << format_percent(report.macro_recall, 4)
            << "%, macro precision "
            << format_percent(report.macro_precision, 4) << "%, macro f1 "
            << format_percent(report.macro_f1, 4) << "% on "
            << report.n_evaluated << " samples\n";
  return 0;
}

// ---------------------------------------------------------------------------
// grid
// ---------------------------------------------------------------------------

struct GridArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;  // optional out_dir override
  int workers = 1;
};

int cmd_grid(const GridArgs& args) {
  std::string config_text = read_text_file(args.config, ErrorKind::BadConfig);
  for (const KeyValue& kv : parse_overrides(args.overrides)) {
    config_text = apply_config_override(config_text, kv.key, kv.value);
  }
  if (!args.out.empty()) {
    config_text = apply_config_override(config_text, "out_dir", args.out);
  }
  const ExperimentConfig config = parse_config(config_text);

  RunOptions options;
  options.workers = args.workers;
  options.progress = [](const CellResult& cell, std::size_t done,
                        std::size_t total) {
    std::cerr << "[" << done << "/" << total << "] " << cell.model_tag << " "
              << cell.scenario_tag << " rate=" << format_double(cell.rate)
              << " seed=" << cell.seed << " " << to_string(cell.status);
    if (cell.status == CellStatus::Ok) {
      std::cerr << " acc=" << format_percent(cell.metrics.accuracy, 4) << "%";
    } else {
      std::cerr << " (" << cell.error << ")";
    }
    std::cerr << "\n";
  };

  const std::vector<CellResult> cells = run_grid(config, options);
  std::size_t ok = 0;
  for (const CellResult& cell : cells) {
    if (cell.status == CellStatus::Ok) ++ok;
  }
  std::cout << "grid: " << cells.size() << " cells, " << ok
            << " ok, results in " << config.out_dir.string() << "\n";
  return ok == cells.size() ? 0 : 3;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
  std::string results = "results";
  std::string out;
};

int cmd_report(const ReportArgs& args) {
  const std::string markdown = render_report(args.results);
  const fs::path out_path =
      args.out.empty() ? fs::path(args.results) / "report.md"
                       : fs::path(args.out);
  write_text_file(out_path, markdown);
  std::cout << "report: wrote " << out_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-flipping poisoning benchmark for EEG band-power "
               "risk classification"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic band-power CSV");
  synth_cmd->add_option("--out", synth_args.out, "Output CSV path")
      ->required();
  synth_cmd
      ->add_option("--per-class", synth_args.per_class, "Samples per class")
      ->capture_default_str();
  synth_cmd
      ->add_option("--separation", synth_args.separation,
                   "Distance between class means, in stdev units")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_args.seed, "Generator seed")
      ->capture_default_str();

  SplitArgs split_args;
  auto* split_cmd =
      app.add_subcommand("split", "Stratified train/test split of a CSV");
  split_cmd->add_option("--in", split_args.in, "Input CSV path")->required();
  split_cmd->add_option("--train-out", split_args.train_out, "Train CSV path")
      ->required();
  split_cmd->add_option("--test-out", split_args.test_out, "Test CSV path")
      ->required();
  split_cmd
      ->add_option("--fraction", split_args.fraction, "Train fraction in (0,1)")
      ->capture_default_str();
  split_cmd->add_option("--seed", split_args.seed, "Shuffle seed")
      ->capture_default_str();

  PoisonArgs poison_args;
  auto* poison_cmd = app.add_subcommand(
      "poison", "Apply a label-flipping attack to a training CSV");
  poison_cmd->add_option("--in", poison_args.in, "Input CSV path")->required();
  poison_cmd->add_option("--out", poison_args.out, "Poisoned CSV path")
      ->required();
  poison_cmd
      ->add_option("--scenario", poison_args.scenario,
                   "to_target, to_target(<label>) or next_level")
      ->required();
  poison_cmd
      ->add_option("--rate", poison_args.rate,
                   "Poison rate in [0,1], fraction of the whole set")
      ->required();
  poison_cmd->add_option("--seed", poison_args.seed, "Victim-selection seed")
      ->capture_default_str();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Fit one model on a CSV");
  train_cmd->add_option("--in", train_args.in, "Training CSV path")
      ->required();
  train_cmd
      ->add_option("--model", train_args.model_kind,
                   "knn, random_forest, ada_boost or mlp")
      ->required();
  train_cmd->add_option("--out", train_args.out, "Model JSON path")
      ->required();
  train_cmd
      ->add_option("--set", train_args.overrides,
                   "Hyperparameter override KEY=VALUE (repeatable)")
      ->take_all();
  train_cmd->add_option("--seed", train_args.seed, "Model seed")
      ->capture_default_str();
  train_cmd
      ->add_option("--budget-ms", train_args.budget_ms,
                   "Wall-clock training budget in milliseconds")
      ->capture_default_str();

  EvalArgs eval_args;
  auto* eval_cmd =
      app.add_subcommand("eval", "Evaluate a saved model on a CSV");
  eval_cmd->add_option("--model", eval_args.model, "Model JSON path")
      ->required();
  eval_cmd->add_option("--in", eval_args.in, "Evaluation CSV path")
      ->required();
  eval_cmd->add_option("--out", eval_args.out,
                       "Metrics JSON path (omit to skip)");

  GridArgs grid_args;
  auto* grid_cmd = app.add_subcommand(
      "grid", "Run the scenario x rate x model x seed grid");
  grid_cmd->add_option("--config", grid_args.config, "Config JSON path")
      ->required();
  grid_cmd
      ->add_option("--set", grid_args.overrides,
                   "Config override KEY=VALUE, dotted paths allowed "
                   "(repeatable)")
      ->take_all();
  grid_cmd->add_option("--out", grid_args.out,
                       "Override the config's out_dir");
  grid_cmd->add_option("--workers", grid_args.workers, "Parallel cell count")
      ->capture_default_str();

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand(
      "report", "Render markdown tables from grid results");
  report_cmd
      ->add_option("--results", report_args.results,
                   "Directory holding results.csv")
      ->capture_default_str();
  report_cmd->add_option("--out", report_args.out,
                         "Report path (default <results>/report.md)");

  int rc = 0;
  synth_cmd->callback([&]() { rc = cmd_synth(synth_args); });
  split_cmd->callback([&]() { rc = cmd_split(split_args); });
  poison_cmd->callback([&]() { rc = cmd_poison(poison_args); });
  train_cmd->callback([&]() { rc = cmd_train(train_args); });
  eval_cmd->callback([&]() { rc = cmd_eval(eval_args); });
  grid_cmd->callback([&]() { rc = cmd_grid(grid_args); });
  report_cmd->callback([&]() { rc = cmd_report(report_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors are exit 1, --help is 0
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(category(e.kind()));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::Runtime);
  }
  return rc;
}
