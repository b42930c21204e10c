#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "eegpoison/data.hpp"
#include "eegpoison/errors.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace eegpoison;

namespace {

std::string synth_csv() {
  SynthSpec spec;
  spec.per_class_count = 10;
  spec.seed = 3;
  return to_csv(synthesize(spec));
}

}  // namespace

TEST_CASE("risk labels map both ways") {
  CHECK(to_string(RiskLabel::Low) == "Low-Risk");
  CHECK(to_string(RiskLabel::Normal) == "Normal");
  CHECK(to_string(RiskLabel::Medium) == "Medium-Risk");
  CHECK(to_string(RiskLabel::High) == "High-Risk");
  for (const RiskLabel label : kAllLabels) {
    CHECK(parse_risk_label(to_string(label)) == label);
  }
  CHECK(static_cast<int>(RiskLabel::Low) == 0);
  CHECK(static_cast<int>(RiskLabel::High) == 3);
}

TEST_CASE("label parsing trims and ignores case") {
  CHECK(parse_risk_label("  high-risk  ") == RiskLabel::High);
  CHECK(parse_risk_label("NORMAL") == RiskLabel::Normal);
  CHECK(parse_risk_label("medium-RISK") == RiskLabel::Medium);
  CHECK_THROWS_AS(parse_risk_label("Extreme-Risk"), Error);
  try {
    parse_risk_label("Extreme-Risk", 7);
    FAIL("expected a bad label error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadLabel);
    CHECK(e.row() == 7);
  }
}

TEST_CASE("canonical feature names are electrode major") {
  const auto names = eeg_feature_names();
  REQUIRE(names.size() == kNumEegFeatures);
  CHECK(names.front() == "AF3_THETA");
  CHECK(names[4] == "AF3_GAMMA");
  CHECK(names[5] == "T7_THETA");
  CHECK(names.back() == "AF4_GAMMA");
  const std::set<std::string> unique(names.begin(), names.end());
  CHECK(unique.size() == names.size());
}

TEST_CASE("generic feature names are f0 through fn-1") {
  const auto names = generic_feature_names(3);
  REQUIRE(names.size() == 3);
  CHECK(names[0] == "f0");
  CHECK(names[2] == "f2");
}

TEST_CASE("csv round trip is byte identical") {
  const std::string text = synth_csv();
  const Dataset ds = testutil::load_text(text);
  CHECK(to_csv(ds) == text);
  CHECK(ds.size() == 40);
  CHECK(ds.n_features() == kNumEegFeatures);
}

TEST_CASE("csv file round trip through disk") {
  const auto dir = testutil::temp_dir("data_roundtrip");
  const std::string path = (dir / "ds.csv").string();
  SynthSpec spec;
  spec.per_class_count = 5;
  const Dataset ds = synthesize(spec);
  save_csv(ds, path);
  const Dataset back = load_csv(path);
  CHECK(to_csv(back) == to_csv(ds));
  CHECK(dataset_fingerprint(back) == dataset_fingerprint(ds));
}

TEST_CASE("loader binds columns by header name, not position") {
  const Dataset ds = testutil::load_text(synth_csv());
  // Move the label column to the front and swap two feature columns.
  std::string shuffled = "RISK_LABEL,AF3_GAMMA,AF3_ALPHA,AF3_LOW_BETA,AF3_HIGH_BETA,AF3_THETA";
  const auto names = eeg_feature_names();
  for (std::size_t j = 5; j < names.size(); ++j) shuffled += "," + names[j];
  shuffled += "\n";
  for (const Sample& s : ds.samples) {
    shuffled += to_string(s.label);
    shuffled += "," + format_double(s.features[4]);
    shuffled += "," + format_double(s.features[1]);
    shuffled += "," + format_double(s.features[2]);
    shuffled += "," + format_double(s.features[3]);
    shuffled += "," + format_double(s.features[0]);
    for (std::size_t j = 5; j < names.size(); ++j) {
      shuffled += "," + format_double(s.features[j]);
    }
    shuffled += "\n";
  }
  const Dataset back = testutil::load_text(shuffled);
  CHECK(back.feature_names == names);
  CHECK(to_csv(back) == to_csv(ds));
}

TEST_CASE("loader accepts the AF_ALPHA alias for AF3_ALPHA") {
  std::string text = synth_csv();
  const auto pos = text.find("AF3_ALPHA");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 9, "AF_ALPHA");
  const Dataset ds = testutil::load_text(text);
  CHECK(ds.feature_names[1] == "AF3_ALPHA");
  CHECK(ds.size() == 40);
}

TEST_CASE("missing feature column is reported by name") {
  const Dataset ds = testutil::load_text(synth_csv());
  std::string text;
  const auto names = eeg_feature_names();
  bool first = true;
  for (const auto& name : names) {
    if (name == "Pz_GAMMA") continue;
    text += (first ? "" : ",") + name;
    first = false;
  }
  text += ",RISK_LABEL\n";
  for (const Sample& s : ds.samples) {
    std::string row;
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (names[j] == "Pz_GAMMA") continue;
      row += format_double(s.features[j]) + ",";
    }
    text += row + to_string(s.label) + "\n";
  }
  try {
    testutil::load_text(text);
    FAIL("expected a missing column error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingColumn);
    CHECK(std::string(e.what()).find("Pz_GAMMA") != std::string::npos);
  }
}

TEST_CASE("bad numeric cell carries row and column") {
  std::string text = synth_csv();
  // Corrupt the second data row's first cell.
  std::size_t row_start = text.find('\n') + 1;
  row_start = text.find('\n', row_start) + 1;
  const std::size_t cell_end = text.find(',', row_start);
  text.replace(row_start, cell_end - row_start, "not_a_number");
  try {
    testutil::load_text(text);
    FAIL("expected a bad number error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadNumber);
    CHECK(e.row() == 2);
    CHECK(e.column() == "AF3_THETA");
  }
}

TEST_CASE("bad label cell carries its row") {
  std::string text = synth_csv();
  std::size_t pos = text.find("\n") + 1;
  for (int skip = 0; skip < 6; ++skip) pos = text.find('\n', pos) + 1;
  // Row 7: replace the trailing label.
  const std::size_t row_end = text.find('\n', pos);
  const std::size_t label_start = text.rfind(',', row_end) + 1;
  text.replace(label_start, row_end - label_start, "Extreme-Risk");
  try {
    testutil::load_text(text);
    FAIL("expected a bad label error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadLabel);
    CHECK(e.row() == 7);
  }
}

TEST_CASE("short row carries its row number") {
  std::string text = synth_csv();
  const std::size_t row_start = text.find('\n') + 1;
  const std::size_t row_end = text.find('\n', row_start);
  const std::size_t last_comma = text.rfind(',', row_end);
  text.erase(row_start, row_end - row_start);
  text.insert(row_start, "1.0,2.0,Low-Risk");
  (void)last_comma;
  try {
    testutil::load_text(text);
    FAIL("expected a bad row error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadRow);
    CHECK(e.row() == 1);
  }
}

TEST_CASE("header-only text is rejected as empty") {
  std::string header = synth_csv();
  header.erase(header.find('\n') + 1);
  try {
    testutil::load_text(header);
    FAIL("expected an empty file error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyFile);
  }
}

TEST_CASE("missing file is an io error naming the path") {
  try {
    load_csv("/nonexistent/eegpoison_missing.csv");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
    CHECK(std::string(e.what()).find("eegpoison_missing.csv") != std::string::npos);
  }
}

TEST_CASE("scientific notation parses") {
  std::string text = synth_csv();
  const std::size_t row_start = text.find('\n') + 1;
  const std::size_t cell_end = text.find(',', row_start);
  text.replace(row_start, cell_end - row_start, "1.5e-3");
  const Dataset ds = testutil::load_text(text);
  CHECK(ds.samples[0].features[0] == doctest::Approx(0.0015));
}

TEST_CASE("synthesize yields balanced deterministic data") {
  SynthSpec spec;
  spec.per_class_count = 100;
  spec.separation = 6.0;
  spec.seed = 0;
  const Dataset a = synthesize(spec);
  const Dataset b = synthesize(spec);
  REQUIRE(a.size() == 400);
  const auto counts = a.class_counts();
  for (const auto c : counts) CHECK(c == 100);
  CHECK(to_csv(a) == to_csv(b));

  SynthSpec other = spec;
  other.seed = 1;
  CHECK(to_csv(synthesize(other)) != to_csv(a));
}

TEST_CASE("synthesized class means sit separation apart") {
  SynthSpec spec;
  spec.per_class_count = 400;
  spec.separation = 6.0;
  spec.seed = 5;
  const Dataset ds = synthesize(spec);

  std::array<std::array<double, kNumEegFeatures>, kNumClasses> means{};
  std::array<int, kNumClasses> counts{};
  for (const Sample& s : ds.samples) {
    const int c = static_cast<int>(s.label);
    counts[c] += 1;
    for (std::size_t j = 0; j < kNumEegFeatures; ++j) means[c][j] += s.features[j];
  }
  for (int c = 0; c < static_cast<int>(kNumClasses); ++c) {
    for (std::size_t j = 0; j < kNumEegFeatures; ++j) means[c][j] /= counts[c];
  }
  for (int a = 0; a < static_cast<int>(kNumClasses); ++a) {
    for (int b = a + 1; b < static_cast<int>(kNumClasses); ++b) {
      double sq = 0.0;
      for (std::size_t j = 0; j < kNumEegFeatures; ++j) {
        const double d = means[a][j] - means[b][j];
        sq += d * d;
      }
      // Estimated means wander by O(sigma / sqrt(n)) per coordinate.
      CHECK(std::sqrt(sq) == doctest::Approx(spec.separation).epsilon(0.05));
    }
  }
}

TEST_CASE("synthesized clusters are nearest-neighbor separable at the default separation") {
  SynthSpec spec;
  spec.per_class_count = 100;
  spec.separation = 6.0;
  spec.seed = 0;
  const Dataset ds = synthesize(spec);
  const SplitResult split = stratified_split(ds, 0.8, 0);

  // Raw 1-NN on the unscaled features; distances only, no model involved.
  int correct = 0;
  for (const Sample& q : split.test.samples) {
    if (oracles::knn_predict(split.train, 1, q.features) == q.label) ++correct;
  }
  const double accuracy = static_cast<double>(correct) / split.test.size();
  CHECK(accuracy >= 0.99);
}

TEST_CASE("zero separation collapses the clusters") {
  SynthSpec spec;
  spec.per_class_count = 100;
  spec.separation = 0.0;
  spec.seed = 0;
  const Dataset ds = synthesize(spec);
  const SplitResult split = stratified_split(ds, 0.8, 0);
  int correct = 0;
  for (const Sample& q : split.test.samples) {
    if (oracles::knn_predict(split.train, 1, q.features) == q.label) ++correct;
  }
  const double accuracy = static_cast<double>(correct) / split.test.size();
  CHECK(accuracy < 0.5);
}

TEST_CASE("synthesize validates its spec") {
  SynthSpec bad_count;
  bad_count.per_class_count = 0;
  CHECK_THROWS_AS(synthesize(bad_count), Error);
  SynthSpec bad_sep;
  bad_sep.separation = -1.0;
  CHECK_THROWS_AS(synthesize(bad_sep), Error);
}

TEST_CASE("stratified split rounds per class and preserves order") {
  // 1550 rows split 0.8 must give 1240 train / 310 test.
  SynthSpec spec;
  spec.per_class_count = 100;
  spec.seed = 2;
  Dataset ds = synthesize(spec);
  // Unbalance: drop to 1550-equivalent shape by synthesizing more and trimming.
  // Simpler: replicate counts 500/400/350/300 from a larger pool.
  SynthSpec big;
  big.per_class_count = 500;
  big.seed = 2;
  const Dataset pool = synthesize(big);
  const std::array<int, 4> wanted{500, 400, 350, 300};
  Dataset mixed;
  mixed.feature_names = pool.feature_names;
  std::array<int, 4> taken{};
  for (const Sample& s : pool.samples) {
    const int c = static_cast<int>(s.label);
    if (taken[c] < wanted[c]) {
      mixed.samples.push_back(s);
      taken[c] += 1;
    }
  }
  REQUIRE(mixed.size() == 1550);

  const SplitResult split = stratified_split(mixed, 0.8, 7);
  CHECK(split.train.size() == 1240);
  CHECK(split.test.size() == 310);
  for (int c = 0; c < 4; ++c) {
    CHECK(split.train_counts[c] ==
          static_cast<std::size_t>(std::lround(0.8 * wanted[c])));
    CHECK(split.train_counts[c] + split.test_counts[c] ==
          static_cast<std::size_t>(wanted[c]));
  }

  // Disjoint union: fingerprints of train+test together equal the input.
  Dataset reunion;
  reunion.feature_names = mixed.feature_names;
  reunion.samples = split.train.samples;
  reunion.samples.insert(reunion.samples.end(), split.test.samples.begin(),
                         split.test.samples.end());
  CHECK(dataset_fingerprint(reunion) == dataset_fingerprint(mixed));

  // Order preserved within each side.
  const SplitResult again = stratified_split(mixed, 0.8, 7);
  CHECK(to_csv(again.train) == to_csv(split.train));
  CHECK(to_csv(again.test) == to_csv(split.test));

  const SplitResult other = stratified_split(mixed, 0.8, 8);
  CHECK(to_csv(other.train) != to_csv(split.train));
}

TEST_CASE("split rejects degenerate classes and bad fractions") {
  const Dataset ds = testutil::make_labeled(
      {RiskLabel::Low, RiskLabel::Low, RiskLabel::Normal, RiskLabel::Normal,
       RiskLabel::Medium, RiskLabel::Medium, RiskLabel::High});
  try {
    stratified_split(ds, 0.8, 0);
    FAIL("expected a degenerate class error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateClass);
    CHECK(std::string(e.what()).find("High-Risk") != std::string::npos);
  }

  SynthSpec spec;
  spec.per_class_count = 10;
  const Dataset ok = synthesize(spec);
  CHECK_THROWS_AS(stratified_split(ok, 0.0, 0), Error);
  CHECK_THROWS_AS(stratified_split(ok, 1.0, 0), Error);
}

TEST_CASE("scaler centers and normalizes the fit set only") {
  SynthSpec spec;
  spec.per_class_count = 50;
  spec.seed = 4;
  const Dataset ds = synthesize(spec);
  const SplitResult split = stratified_split(ds, 0.8, 4);
  const Scaler scaler = fit_scaler(split.train);
  const Dataset scaled_train = apply_scaler(scaler, split.train);

  for (std::size_t j = 0; j < scaled_train.n_features(); ++j) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const Sample& s : scaled_train.samples) {
      sum += s.features[j];
      sum_sq += s.features[j] * s.features[j];
    }
    const double mean = sum / scaled_train.size();
    const double var = sum_sq / scaled_train.size() - mean * mean;
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-6));
  }

  // Test rows use the train statistics, so they are not exactly centered.
  const Dataset scaled_test = apply_scaler(scaler, split.test);
  double test_mean0 = 0.0;
  for (const Sample& s : scaled_test.samples) test_mean0 += s.features[0];
  test_mean0 /= scaled_test.size();
  CHECK(std::abs(test_mean0) > 1e-12);
}

TEST_CASE("constant columns scale to zero") {
  Dataset ds = testutil::make_labeled(
      {RiskLabel::Low, RiskLabel::Normal, RiskLabel::Medium, RiskLabel::High},
      2);
  for (Sample& s : ds.samples) s.features[0] = 7.3;
  const Scaler scaler = fit_scaler(ds);
  const Dataset scaled = apply_scaler(scaler, ds);
  for (const Sample& s : scaled.samples) CHECK(s.features[0] == 0.0);
}

TEST_CASE("validate rejects inconsistent widths") {
  Dataset ds = testutil::make_labeled({RiskLabel::Low, RiskLabel::Normal}, 3);
  ds.samples[1].features.pop_back();
  CHECK_THROWS_AS(validate(ds), Error);
}
