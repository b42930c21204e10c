#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "eegpoison/data.hpp"
#include "eegpoison/experiment.hpp"
#include "eegpoison/metrics.hpp"
#include "eegpoison/models.hpp"
#include "eegpoison/poison.hpp"

using namespace eegpoison;

namespace {

const SplitResult& bench_split() {
  static const SplitResult split = [] {
    SynthSpec spec;
    spec.per_class_count = 50;
    spec.separation = 6.0;
    spec.seed = 0;
    return stratified_split(synthesize(spec), 0.8, 0);
  }();
  return split;
}

void BM_Synthesize(benchmark::State& state) {
  SynthSpec spec;
  spec.per_class_count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize(spec));
  }
}
BENCHMARK(BM_Synthesize)->Arg(50)->Arg(200);

void BM_StratifiedSplit(benchmark::State& state) {
  SynthSpec spec;
  spec.per_class_count = 100;
  const Dataset ds = synthesize(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stratified_split(ds, 0.8, 0));
  }
}
BENCHMARK(BM_StratifiedSplit);

void BM_PlanFlips(benchmark::State& state) {
  const Dataset& train = bench_split().train;
  PoisonSpec spec;
  spec.scenario = PoisonScenario::to_target(RiskLabel::High);
  spec.rate = 0.5;
  spec.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_flips(train, spec));
  }
}
BENCHMARK(BM_PlanFlips);

void BM_FitKnn(benchmark::State& state) {
  KnnSpec spec;
  spec.k = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(ClassifierSpec(spec), bench_split().train));
  }
}
BENCHMARK(BM_FitKnn);

void BM_FitForest(benchmark::State& state) {
  RandomForestSpec spec;
  spec.n_trees = static_cast<int>(state.range(0));
  spec.seed = 17;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(ClassifierSpec(spec), bench_split().train));
  }
}
BENCHMARK(BM_FitForest)->Arg(10)->Arg(50);

void BM_FitAdaBoost(benchmark::State& state) {
  AdaBoostSpec spec;
  spec.n_rounds = static_cast<int>(state.range(0));
  spec.seed = 17;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(ClassifierSpec(spec), bench_split().train));
  }
}
BENCHMARK(BM_FitAdaBoost)->Arg(10)->Arg(50);

void BM_FitMlp(benchmark::State& state) {
  MlpSpec spec;
  spec.epochs = static_cast<int>(state.range(0));
  spec.seed = 17;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(ClassifierSpec(spec), bench_split().train));
  }
}
BENCHMARK(BM_FitMlp)->Arg(10)->Arg(50);

void BM_PredictKnn(benchmark::State& state) {
  KnnSpec spec;
  spec.k = 5;
  const TrainedModel model = fit(ClassifierSpec(spec), bench_split().train);
  const Dataset& test = bench_split().test;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predict(test));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(test.size()));
}
BENCHMARK(BM_PredictKnn);

void BM_Summarize(benchmark::State& state) {
  const Dataset& test = bench_split().test;
  KnnSpec spec;
  const TrainedModel model = fit(ClassifierSpec(spec), bench_split().train);
  std::vector<RiskLabel> truth;
  for (const Sample& s : test.samples) truth.push_back(s.label);
  const auto preds = model.predict(test);
  for (auto _ : state) {
    benchmark::DoNotOptimize(summarize(confusion(truth, preds)));
  }
}
BENCHMARK(BM_Summarize);

void BM_RunCell(benchmark::State& state) {
  const SplitResult& split = bench_split();
  KnnSpec model;
  model.k = 5;
  PoisonSpec poison;
  poison.scenario = PoisonScenario::next_level();
  poison.rate = 0.25;
  poison.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_cell(split.train, split.test, ClassifierSpec(model), poison));
  }
}
BENCHMARK(BM_RunCell);

}  // namespace

BENCHMARK_MAIN();
