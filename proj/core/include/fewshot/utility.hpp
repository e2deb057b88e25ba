#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "fewshot/types.hpp"
#include "fewshot/utility_cache.hpp"

namespace fewshot {

// Produces a raw completion for an assembled prompt. Implementations must be
// safe to call from several threads at once.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual std::string predict(const std::string& prompt) = 0;
};

// Forwards to another evaluator and counts calls.
class CountingEvaluator final : public Evaluator {
 public:
  explicit CountingEvaluator(Evaluator& inner) : inner_(inner) {}

  std::string predict(const std::string& prompt) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_.predict(prompt);
  }

  std::uint64_t calls() const { return calls_.load(); }
  void reset() { calls_ = 0; }

 private:
  Evaluator& inner_;
  std::atomic<std::uint64_t> calls_{0};
};

// Mean per-point unit score of the evaluator's predictions under
// assemble_prompt(task, coalition, x) over the batch. The cache is consulted
// first and filled on a miss. Unparseable predictions simply score 0 under
// the metric; evaluator exceptions propagate. `workers` bounds how many
// points are scored concurrently.
double utility(const OrderedExampleSet& coalition, const EvalBatch& batch, Evaluator& evaluator,
               const TaskSpec& task, UtilityCache& cache, std::size_t workers = 1);

// Coalition -> value. Synthetic games in tests implement this directly; the
// real one binds utility() to a batch.
using ValueFunction = std::function<double(const OrderedExampleSet&)>;

struct UtilityContext {
  const TaskSpec& task;
  Evaluator& evaluator;
  UtilityCache& cache;
  std::size_t workers = 1;

  double operator()(const OrderedExampleSet& coalition, const EvalBatch& batch) const {
    return utility(coalition, batch, evaluator, task, cache, workers);
  }

  // The returned function refers to `batch`; keep it alive.
  ValueFunction bind(const EvalBatch& batch) const {
    return [ctx = *this, &batch](const OrderedExampleSet& coalition) { return ctx(coalition, batch); };
  }
};

}  // namespace fewshot
