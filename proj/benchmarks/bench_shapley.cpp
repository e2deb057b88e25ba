#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "fewshot/llm/mock.hpp"
#include "fewshot/shapley.hpp"
#include "fewshot/utility.hpp"
#include "fewshot/utility_cache.hpp"

namespace {

using namespace fewshot;

OrderedExampleSet examples(std::size_t n) {
  std::vector<Example> items;
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back({"e" + std::to_string(i), (i % 2 ? "[bad] " : "[good] ") + std::to_string(i),
                     i % 2 ? "negative" : "positive", Origin::manual});
  }
  return OrderedExampleSet(std::move(items));
}

ValueFunction weighted(std::size_t n) {
  return [n](const OrderedExampleSet& s) {
    double v = 0;
    for (const auto& e : s) v += static_cast<double>(e.id.size()) / static_cast<double>(n);
    return v;
  };
}

void BM_McShapleyValueFunction(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto set = examples(n);
  const auto value = weighted(n);
  for (auto _ : state) benchmark::DoNotOptimize(mc_shapley(set, value, 3, 1));
}
BENCHMARK(BM_McShapleyValueFunction)->Arg(4)->Arg(16)->Arg(64);

void BM_ExactShapley(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto set = examples(n);
  const auto value = weighted(n);
  for (auto _ : state) benchmark::DoNotOptimize(exact_shapley(set, value));
}
BENCHMARK(BM_ExactShapley)->Arg(4)->Arg(6)->Arg(8);

// Full utility path: prompt assembly, a synthetic evaluator and the cache,
// with a fresh cache each iteration.
void BM_McShapleySyntheticUtility(benchmark::State& state) {
  TaskSpec task;
  task.instruction = "Classify the sentiment.";
  task.label_set = {"positive", "negative"};
  Dataset data;
  for (std::size_t j = 0; j < 70; ++j) {
    data.push_back({std::to_string(j), "point " + std::to_string(j),
                    std::string(j % 2 ? "negative" : "positive")});
  }
  const EvalBatch batch(data);
  mock::SyntheticEvaluator evaluator(task, data);
  const auto set = examples(16);
  const auto workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    UtilityCache cache;
    benchmark::DoNotOptimize(mc_shapley(set, batch, evaluator, task, cache, 3, 1, workers));
  }
}
BENCHMARK(BM_McShapleySyntheticUtility)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
