#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eegpoison/data.hpp"
#include "eegpoison/metrics.hpp"
#include "eegpoison/models.hpp"
#include "eegpoison/poison.hpp"

namespace eegpoison {

struct DataSource {
  std::optional<std::filesystem::path> csv_path;
  std::optional<SynthSpec> synth;
};

/// One grid definition: data source, split fraction, attack scenarios,
/// poison rates, model specs and replicate seeds.
struct ExperimentConfig {
  DataSource data;
  double train_fraction = 0.8;
  std::vector<PoisonScenario> scenarios;
  std::vector<double> rates = {0.0, 0.05, 0.25, 0.50, 0.75};
  std::vector<ClassifierSpec> models;
  std::vector<std::uint64_t> seeds = {1};
  std::filesystem::path out_dir = "results";
  std::int64_t cell_budget_ms = 120000;
  /// When false (default) duration_ms is written as 0 in results.csv and
  /// results.json so reruns are byte-identical; returned CellResults always
  /// carry the measured durations.
  bool record_durations = false;

  void validate() const;
};

/// Parses the JSON mirror of ExperimentConfig. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies one `--set KEY=VALUE` override onto raw config JSON text. KEY may
/// be a dotted path ("data.synth.separation"); VALUE is parsed as JSON when
/// possible and treated as a string otherwise.
std::string apply_config_override(const std::string& json_text,
                                  const std::string& key,
                                  const std::string& value);

enum class CellStatus { Ok, Failed, TimedOut };

const char* to_string(CellStatus status);

struct CellResult {
  std::string model_tag;
  std::string scenario_tag;  // "none" for the rate-0 baseline rows
  double rate = 0.0;
  std::uint64_t seed = 0;
  CellStatus status = CellStatus::Ok;
  std::string error;

  MetricsReport metrics;
  ConfusionMatrix confusion;
  std::size_t flips_requested = 0;
  std::size_t flips_actual = 0;
  bool clamped = false;
  std::int64_t duration_ms = 0;
  std::string fingerprint;            // seed-free hyperparameter hash
  std::string spec_json;              // realized spec, including cell seed
};

/// Poison train -> fit -> evaluate on the (never poisoned) test set.
CellResult run_cell(const Dataset& train, const Dataset& test,
                    const ClassifierSpec& model_spec,
                    const PoisonSpec& poison_spec,
                    const FitBudget* budget = nullptr);

struct RunOptions {
  int workers = 1;
  /// Called after each cell completes (from worker threads, serialized).
  std::function<void(const CellResult&, std::size_t done, std::size_t total)>
      progress;
};

/// Runs the full grid and writes results.csv / results.json into
/// config.out_dir. One split per seed, shared by every cell of that seed.
/// Cell failures are recorded per row; the grid continues. Returns cells in
/// canonical (model, scenario, rate, seed) order.
std::vector<CellResult> run_grid(const ExperimentConfig& config,
                                 const RunOptions& options = {});

/// Deterministic renderings of a finished grid. With record_durations off,
/// duration_ms renders as 0 in both formats so reruns are byte-identical.
std::string results_to_csv(const std::vector<CellResult>& cells,
                           bool record_durations);
std::string results_to_json(const std::vector<CellResult>& cells,
                            bool record_durations);

inline constexpr const char* kResultsCsvHeader =
    "model,scenario,rate,seed,accuracy,macro_recall,macro_precision,"
    "macro_f1,n_flipped,clamped,duration_ms,status";

}  // namespace eegpoison
