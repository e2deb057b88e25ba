#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fewshot/types.hpp"
#include "fewshot/utility.hpp"

namespace fewshot {

// Per-example Shapley estimate, index-aligned with the example set.
struct ShapleyEstimate {
  std::vector<double> values;
  // Sampled marginal contributions of each example, in permutation order.
  std::vector<std::vector<double>> contributions;
  std::size_t permutations_used = 0;
};

// Largest set exact_shapley will enumerate (8! = 40320 permutations).
inline constexpr std::size_t kMaxExactShapleySize = 8;

// Monte-Carlo Shapley over `permutations` uniform random orderings.
//
// Each ordering is walked prefix by prefix: the coalition before example i
// joins is the permutation prefix (in permutation order) and i's marginal is
// v(prefix + i) - v(prefix). v(empty) is the zero-shot value. Permutation p
// draws from its own substream derive_seed(seed, "permutation", p), so the
// result is bit-identical for every worker count. With workers > 1 the value
// function is called concurrently and must be thread-safe.
ShapleyEstimate mc_shapley(const OrderedExampleSet& examples, const ValueFunction& value,
                           std::size_t permutations, std::uint64_t seed,
                           std::size_t workers = 1);

// mc_shapley with v = utility(., batch) memoized through `cache`; at most
// permutations * n + 1 distinct coalitions reach the evaluator.
ShapleyEstimate mc_shapley(const OrderedExampleSet& examples, const EvalBatch& batch,
                           Evaluator& evaluator, const TaskSpec& task, UtilityCache& cache,
                           std::size_t permutations, std::uint64_t seed,
                           std::size_t workers = 1);

// Average marginal contribution over all n! orderings, with the same
// prefix-order coalitions as mc_shapley. Throws SizeError above
// kMaxExactShapleySize examples.
std::vector<double> exact_shapley(const OrderedExampleSet& examples, const ValueFunction& value);
std::vector<double> exact_shapley(const OrderedExampleSet& examples, const EvalBatch& batch,
                                  Evaluator& evaluator, const TaskSpec& task,
                                  UtilityCache& cache);

// argmin; ties go to the lowest index.
std::size_t worst_index(std::span<const double> values);
std::size_t worst_index(const ShapleyEstimate& estimate);

// argmax_i v(examples without i), remaining order preserved; ties go to the
// lowest index.
std::size_t loo_worst_index(const OrderedExampleSet& examples, const ValueFunction& value);
std::size_t loo_worst_index(const OrderedExampleSet& examples, const EvalBatch& batch,
                            Evaluator& evaluator, const TaskSpec& task, UtilityCache& cache);

// {"permutations": P, "worst_index": i, "examples": [{"index", "id", "value",
// "contributions": [...]}, ...]}
nlohmann::json shapley_report_json(const ShapleyEstimate& estimate,
                                   const OrderedExampleSet& examples);

}  // namespace fewshot
