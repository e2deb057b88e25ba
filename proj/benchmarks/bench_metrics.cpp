#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "fewshot/metrics.hpp"

namespace {

const std::string kSource =
    "The Supreme Court decision, announced on Monday, declared the controversial law "
    "unconstitutional and invalidated it across all fifty states.";
const std::string kCandidate = "The Supreme Court said on Monday that the law was unconstitutional.";
const std::vector<std::string> kReferences = {
    "The Supreme Court declared the law unconstitutional on Monday.",
    "On Monday the top court struck down the law.",
    "The court said the law broke the constitution."};

void BM_RougeL(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fewshot::metrics::rouge_l(kCandidate, kReferences));
}
BENCHMARK(BM_RougeL);

void BM_Rouge2(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fewshot::metrics::rouge_n(kCandidate, kReferences, 2));
}
BENCHMARK(BM_Rouge2);

void BM_Sari(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(fewshot::metrics::sari(kSource, kCandidate, kReferences));
  }
}
BENCHMARK(BM_Sari);

void BM_FinalNumber(benchmark::State& state) {
  const std::string prediction =
      "She buys 3 boxes of 12 eggs, uses 1,250 grams of flour, so the answer is 36.";
  for (auto _ : state) benchmark::DoNotOptimize(fewshot::metrics::final_number(prediction, "36"));
}
BENCHMARK(BM_FinalNumber);

}  // namespace
