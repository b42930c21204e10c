#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "eegpoison/data.hpp"
#include "eegpoison/models.hpp"
#include "eegpoison/rng.hpp"
#include "json.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace eegpoison;

namespace {

Dataset random_dataset(std::uint64_t seed, std::size_t n = 20,
                       std::size_t n_features = 2) {
  Rng rng(Rng::derive(seed, "oracle_case"));
  std::vector<RiskLabel> labels;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(static_cast<RiskLabel>(rng.bounded(4)));
  }
  return testutil::make_labeled(labels, n_features, seed * 31 + 7);
}

std::vector<std::vector<double>> random_probes(std::uint64_t seed,
                                               std::size_t count,
                                               std::size_t n_features) {
  Rng rng(Rng::derive(seed, "oracle_probe"));
  std::vector<std::vector<double>> probes(count);
  for (auto& p : probes) {
    p.resize(n_features);
    for (auto& v : p) v = rng.normal() * 1.5;
  }
  return probes;
}

}  // namespace

TEST_CASE("knn matches the exhaustive-sort reference") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Dataset ds = random_dataset(seed);
    const auto probes = random_probes(seed, 10, ds.n_features());
    for (const int k : {1, 3, 5}) {
      KnnSpec spec;
      spec.k = k;
      spec.scale = false;
      const TrainedModel model = fit(ClassifierSpec(spec), ds);
      for (const Sample& s : ds.samples) {
        CHECK(model.predict(s.features) ==
              oracles::knn_predict(ds, k, s.features));
      }
      for (const auto& p : probes) {
        CHECK(model.predict(p) == oracles::knn_predict(ds, k, p));
        ++checked;
      }
    }
  }
  CHECK(checked == 50 * 3 * 10);
}

TEST_CASE("a single unsampled tree matches the exhaustive reference") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Dataset ds = random_dataset(seed, 20, 2);
    const auto probes = random_probes(seed + 500, 20, ds.n_features());
    for (const auto& [max_depth, min_leaf] :
         std::vector<std::pair<int, int>>{{0, 1}, {3, 1}, {0, 2}}) {
      RandomForestSpec spec;
      spec.n_trees = 1;
      spec.bootstrap = false;
      spec.features_per_split = static_cast<int>(ds.n_features());
      spec.max_depth = max_depth;
      spec.min_leaf = min_leaf;
      spec.scale = false;
      spec.seed = seed;
      const TrainedModel model = fit(ClassifierSpec(spec), ds);
      const oracles::OracleTree reference(ds, max_depth, min_leaf);
      CAPTURE(seed);
      CAPTURE(max_depth);
      CAPTURE(min_leaf);
      for (const Sample& s : ds.samples) {
        CHECK(model.predict(s.features) == reference.predict(s.features));
      }
      for (const auto& p : probes) {
        CHECK(model.predict(p) == reference.predict(p));
      }
    }
  }
}

TEST_CASE("the first boosting round picks the reference stump") {
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 200 && compared < 40; ++seed) {
    const Dataset ds = random_dataset(seed, 20, 2);
    const std::vector<double> uniform(ds.size(), 1.0 / ds.size());
    const oracles::OracleStump expect = oracles::stump_search(ds, uniform);
    // Only datasets whose optimum is unique and clearly beats chance make a
    // fair comparison; ties may legitimately resolve differently.
    if (expect.runner_up_error - expect.error <= 1e-9) continue;
    if (expect.error >= 0.75 - 1e-6) continue;

    AdaBoostSpec spec;
    spec.n_rounds = 1;
    spec.seed = seed;
    const TrainedModel model = fit(ClassifierSpec(spec), ds);
    REQUIRE(model.summary().rounds_completed == 1);

    const auto doc = nlohmann::json::parse(model.to_json_string());
    const auto& stump = doc.at("params").at("stumps").at(0);
    CAPTURE(seed);
    CHECK(stump.at("feature").get<int>() == expect.feature);
    if (expect.feature >= 0) {
      CHECK(stump.at("threshold").get<double>() == expect.threshold);
      CHECK(stump.at("left").get<int>() == static_cast<int>(expect.left));
    }
    CHECK(stump.at("right").get<int>() == static_cast<int>(expect.right));
    CHECK(model.summary().boost_errors.at(0) ==
          doctest::Approx(expect.error).epsilon(1e-12));

    const auto probes = random_probes(seed + 900, 10, ds.n_features());
    for (const auto& p : probes) {
      CHECK(model.predict(p) == expect.predict(p));
    }
    ++compared;
  }
  // The uniqueness filter must still leave a meaningful sample.
  CHECK(compared >= 30);
}
