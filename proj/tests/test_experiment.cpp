#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "eegpoison/data.hpp"
#include "eegpoison/errors.hpp"
#include "eegpoison/experiment.hpp"
#include "eegpoison/metrics.hpp"
#include "eegpoison/rng.hpp"
#include "json.hpp"
#include "support/testutil.hpp"

using namespace eegpoison;

namespace {

std::string grid_config_json(const std::string& out_dir) {
  nlohmann::json j;
  j["data"]["synth"] = {{"per_class_count", 12}, {"separation", 6.0}, {"seed", 0}};
  j["train_fraction"] = 0.75;
  j["scenarios"] = {"to_target(High-Risk)", "next_level"};
  j["rates"] = {0.0, 0.5};
  j["models"] = {nlohmann::json{{"kind", "knn"}, {"k", 3}},
                 nlohmann::json{{"kind", "ada_boost"}, {"n_rounds", 3}}};
  j["seeds"] = {1, 2};
  j["out_dir"] = out_dir;
  return j.dump();
}

void expect_bad_config(const std::string& json_text, const std::string& needle) {
  try {
    parse_config(json_text);
    FAIL("expected config rejection for: " << json_text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadConfig);
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("a complete config parses with every field bound") {
  const ExperimentConfig config = parse_config(grid_config_json("/tmp/out"));
  REQUIRE(config.data.synth.has_value());
  CHECK(config.data.synth->per_class_count == 12);
  CHECK(config.train_fraction == 0.75);
  REQUIRE(config.scenarios.size() == 2);
  CHECK(config.scenarios[0].tag() == "to_target(High-Risk)");
  CHECK(config.rates == std::vector<double>{0.0, 0.5});
  REQUIRE(config.models.size() == 2);
  CHECK(config.models[0].kind() == "knn");
  CHECK(config.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(config.out_dir == "/tmp/out");
  CHECK(config.cell_budget_ms == 120000);
  CHECK_FALSE(config.record_durations);
}

TEST_CASE("config rejection covers the whole surface") {
  expect_bad_config("not json", "not valid JSON");
  expect_bad_config("[1,2]", "must be a JSON object");
  expect_bad_config(R"({"data":{"synth":{}},"models":[{"kind":"knn"}],"typo":1})",
                    "unknown key 'typo'");
  expect_bad_config(R"({"data":{"synthh":{}},"models":[{"kind":"knn"}]})",
                    "unknown key 'synthh'");
  expect_bad_config(
      R"({"data":{"synth":{"per_class":5}},"models":[{"kind":"knn"}]})",
      "unknown key 'per_class'");
  expect_bad_config(R"({"models":[{"kind":"knn"}]})", "data");
  expect_bad_config(
      R"({"data":{"csv":"x.csv","synth":{}},"models":[{"kind":"knn"}]})",
      "exactly one data source");
  expect_bad_config(R"({"data":{},"models":[{"kind":"knn"}]})",
                    "exactly one data source");
  expect_bad_config(
      R"({"data":{"synth":{}},"models":[{"kind":"knn","seed":3}]})",
      "must not carry a seed");
  expect_bad_config(
      R"({"data":{"synth":{}},"models":[{"kind":"knn"},{"kind":"knn"}]})",
      "duplicate model kind");
  expect_bad_config(
      R"({"data":{"synth":{}},"models":[{"kind":"knn","k":4}]})", "odd");
  expect_bad_config(R"({"data":{"synth":{}},"models":[]})", "at least one model");
  expect_bad_config(
      R"({"data":{"synth":{}},"models":[{"kind":"knn"}],"rates":[0.5,0.5]})",
      "strictly increasing");
  expect_bad_config(
      R"({"data":{"synth":{}},"models":[{"kind":"knn"}],"rates":[0.5,0.2]})",
      "strictly increasing");
  expect_bad_config(
      R"({"data":{"synth":{}},"models":[{"kind":"knn"}],"rates":[-0.1,0.5]})",
      "in [0, 1]");
  expect_bad_config(
      R"({"data":{"synth":{}},"models":[{"kind":"knn"}],"rates":[]})",
      "at least one rate");
  expect_bad_config(
      R"({"data":{"synth":{}},"models":[{"kind":"knn"}],"scenarios":[]})",
      "at least one scenario");
  expect_bad_config(
      R"({"data":{"synth":{}},"models":[{"kind":"knn"}],"scenarios":["bogus"]})",
      "unknown scenario");
  expect_bad_config(
      R"({"data":{"synth":{}},"models":[{"kind":"knn"}],"train_fraction":1.0})",
      "train_fraction");
  expect_bad_config(
      R"({"data":{"synth":{}},"models":[{"kind":"knn"}],)"
      R"("scenarios":["next_level"],"seeds":[3,3]})",
      "duplicate seed");
  expect_bad_config(
      R"({"data":{"synth":{}},"models":[{"kind":"knn"}],)"
      R"("scenarios":["next_level"],"cell_budget_ms":0})",
      "cell_budget_ms");
}

TEST_CASE("config overrides rewrite dotted paths") {
  const std::string base = grid_config_json("results");

  const std::string deep = apply_config_override(base, "data.synth.seed", "9");
  CHECK(parse_config(deep).data.synth->seed == 9);

  const std::string rates = apply_config_override(base, "rates", "[0]");
  CHECK(parse_config(rates).rates == std::vector<double>{0.0});

  // Values that are not valid JSON fall back to plain strings.
  const std::string moved = apply_config_override(base, "out_dir", "/tmp/abc");
  CHECK(parse_config(moved).out_dir == "/tmp/abc");

  CHECK_THROWS_AS(apply_config_override(base, "", "1"), Error);
  CHECK_THROWS_AS(apply_config_override(base, "rates.0.x", "1"), Error);
  CHECK_THROWS_AS(apply_config_override("nope", "a", "1"), Error);
}

TEST_CASE("a zero-rate cell reproduces the clean baseline bit for bit") {
  SynthSpec synth;
  synth.per_class_count = 20;
  synth.seed = 3;
  const Dataset full = synthesize(synth);
  const SplitResult split = stratified_split(full, 0.8, 5);

  KnnSpec knn;
  knn.k = 3;
  const ClassifierSpec spec(knn);
  PoisonSpec poison;
  poison.scenario = PoisonScenario::next_level();
  poison.rate = 0.0;
  poison.seed = 5;
  const CellResult cell = run_cell(split.train, split.test, spec, poison);
  REQUIRE(cell.status == CellStatus::Ok);
  CHECK(cell.scenario_tag == "none");
  CHECK(cell.flips_actual == 0);

  const TrainedModel clean = fit(spec, split.train);
  std::vector<RiskLabel> truth;
  for (const Sample& s : split.test.samples) truth.push_back(s.label);
  const MetricsReport expected = summarize(confusion(truth, clean.predict(split.test)));
  CHECK(cell.metrics.accuracy == expected.accuracy);
  CHECK(cell.metrics.macro_recall == expected.macro_recall);
  CHECK(cell.metrics.macro_precision == expected.macro_precision);
  CHECK(cell.metrics.macro_f1 == expected.macro_f1);
}

TEST_CASE("an expired budget times the cell out") {
  SynthSpec synth;
  synth.per_class_count = 10;
  const Dataset full = synthesize(synth);
  const SplitResult split = stratified_split(full, 0.8, 1);

  AdaBoostSpec ada;
  ada.n_rounds = 50;
  PoisonSpec poison;
  poison.scenario = PoisonScenario::next_level();
  poison.rate = 0.5;
  poison.seed = 1;
  const FitBudget budget = FitBudget::from_ms(0);
  const CellResult cell =
      run_cell(split.train, split.test, ClassifierSpec(ada), poison, &budget);
  CHECK(cell.status == CellStatus::TimedOut);
  CHECK_FALSE(cell.error.empty());
  CHECK(std::string(to_string(cell.status)) == "timed_out");
}

TEST_CASE("the grid enumerates cells in canonical order") {
  const auto dir = testutil::temp_dir("grid_order");
  const ExperimentConfig config = parse_config(grid_config_json(dir.string()));
  const std::vector<CellResult> cells = run_grid(config);

  // 2 models x (1 baseline + 2 scenarios x 1 nonzero rate) x 2 seeds.
  REQUIRE(cells.size() == 12);

  using Key = std::tuple<std::string, std::string, double, std::uint64_t>;
  std::vector<Key> keys;
  for (const CellResult& cell : cells) {
    keys.emplace_back(cell.model_tag, cell.scenario_tag, cell.rate, cell.seed);
  }
  CHECK(std::is_sorted(keys.begin(), keys.end()));
  CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());

  int baselines = 0;
  for (const CellResult& cell : cells) {
    CHECK(cell.status == CellStatus::Ok);
    if (cell.rate == 0.0) {
      CHECK(cell.scenario_tag == "none");
      ++baselines;
    }
  }
  CHECK(baselines == 4);  // one per model per seed

  // The CSV mirrors the vector order.
  const std::string csv = testutil::slurp(dir / "results.csv");
  CHECK(csv.rfind(std::string(kResultsCsvHeader) + "\n", 0) == 0);
  std::size_t lines = 0;
  for (const char c : csv) {
    if (c == '\n') ++lines;
  }
  CHECK(lines == 13);
  CHECK(csv.find("knn,none,0,1,") != std::string::npos);
  CHECK(csv.find("ada_boost,to_target(High-Risk),0.5,2,") != std::string::npos);
}

TEST_CASE("grid reruns are byte identical even with extra workers") {
  const auto dir_a = testutil::temp_dir("grid_a");
  const auto dir_b = testutil::temp_dir("grid_b");
  const auto dir_c = testutil::temp_dir("grid_c");

  ExperimentConfig config = parse_config(grid_config_json(dir_a.string()));
  run_grid(config);
  config.out_dir = dir_b.string();
  run_grid(config);
  config.out_dir = dir_c.string();
  RunOptions options;
  options.workers = 4;
  run_grid(config, options);

  const std::string csv_a = testutil::slurp(dir_a / "results.csv");
  CHECK(csv_a == testutil::slurp(dir_b / "results.csv"));
  CHECK(csv_a == testutil::slurp(dir_c / "results.csv"));
  const std::string json_a = testutil::slurp(dir_a / "results.json");
  CHECK(json_a == testutil::slurp(dir_b / "results.json"));
  CHECK(json_a == testutil::slurp(dir_c / "results.json"));
  CHECK(!csv_a.empty());
  CHECK(!json_a.empty());
}

TEST_CASE("any grid row can be regenerated in isolation") {
  const auto dir = testutil::temp_dir("grid_isolation");
  const ExperimentConfig config = parse_config(grid_config_json(dir.string()));
  const std::vector<CellResult> cells = run_grid(config);

  // Recompute the knn / to_target / 0.5 / seed 2 cell from first principles.
  const Dataset full = synthesize(*config.data.synth);
  const SplitResult split = stratified_split(full, config.train_fraction, 2);
  ClassifierSpec spec = config.models[0];
  REQUIRE(spec.kind() == "knn");
  spec.set_seed(Rng::derive(2, "model/knn"));
  PoisonSpec poison;
  poison.scenario = PoisonScenario::to_target(RiskLabel::High);
  poison.rate = 0.5;
  poison.seed = 2;
  const CellResult lone = run_cell(split.train, split.test, spec, poison);

  const auto it = std::find_if(cells.begin(), cells.end(), [](const CellResult& c) {
    return c.model_tag == "knn" && c.scenario_tag == "to_target(High-Risk)" &&
           c.rate == 0.5 && c.seed == 2;
  });
  REQUIRE(it != cells.end());
  CHECK(lone.metrics.accuracy == it->metrics.accuracy);
  CHECK(lone.metrics.macro_f1 == it->metrics.macro_f1);
  CHECK(lone.flips_actual == it->flips_actual);
  CHECK(lone.confusion.counts == it->confusion.counts);
}

TEST_CASE("result serializations carry the full cell record") {
  const auto dir = testutil::temp_dir("grid_serial");
  const ExperimentConfig config = parse_config(grid_config_json(dir.string()));
  const std::vector<CellResult> cells = run_grid(config);

  const std::string csv = results_to_csv(cells, false);
  CHECK(csv == testutil::slurp(dir / "results.csv"));
  // Percent columns use four decimals; durations stay zeroed.
  std::istringstream stream(csv);
  std::string line;
  std::getline(stream, line);  // header
  while (std::getline(stream, line)) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      // the scenario field may itself contain "to_target(High-Risk)"; fields
      // hold no commas, so a plain split is safe
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    REQUIRE(fields.size() == 12);
    for (int col = 4; col <= 7; ++col) {
      const std::size_t dot = fields[col].find('.');
      REQUIRE(dot != std::string::npos);
      CHECK(fields[col].size() - dot - 1 == 4);
    }
    CHECK(fields[10] == "0");
    CHECK((fields[9] == "true" || fields[9] == "false"));
    CHECK(fields[11] == "ok");
  }

  const auto doc = nlohmann::json::parse(testutil::slurp(dir / "results.json"));
  REQUIRE(doc.contains("cells"));
  REQUIRE(doc.at("cells").size() == cells.size());
  const auto& row = doc.at("cells").at(0);
  for (const char* key :
       {"model", "scenario", "rate", "seed", "status", "accuracy",
        "macro_recall", "macro_precision", "macro_f1", "confusion",
        "flips_requested", "flips_actual", "clamped", "duration_ms",
        "hyperparameter_fingerprint", "spec", "n_evaluated"}) {
    CAPTURE(key);
    CHECK(row.contains(key));
  }
  CHECK(row.at("duration_ms").get<std::int64_t>() == 0);
  CHECK(row.at("confusion").size() == 4);
  CHECK(row.at("confusion").at(0).size() == 4);
}

TEST_CASE("load_config reads from disk and reports missing files") {
  const auto dir = testutil::temp_dir("config_io");
  const auto path = dir / "config.json";
  testutil::spit(path, grid_config_json((dir / "out").string()));
  const ExperimentConfig config = load_config(path);
  CHECK(config.models.size() == 2);
  try {
    load_config(dir / "absent.json");
    FAIL("expected a missing config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadConfig);
    CHECK(std::string(e.what()).find("absent.json") != std::string::npos);
  }
}
