#include "fewshot/shapley.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "fewshot/error.hpp"
#include "fewshot/parallel.hpp"
#include "fewshot/rng.hpp"

namespace fewshot {
namespace {

// Marginal contributions along one ordering; out[i] is example i's marginal.
std::vector<double> walk_permutation(const OrderedExampleSet& examples, const ValueFunction& value,
                                     std::span<const std::size_t> order, double empty_value) {
  std::vector<double> marginal(examples.size(), 0.0);
  double previous = empty_value;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const double current = value(examples.select(order.first(j + 1)));
    marginal[order[j]] = current - previous;
    previous = current;
  }
  return marginal;
}

}  // namespace

ShapleyEstimate mc_shapley(const OrderedExampleSet& examples, const ValueFunction& value,
                           std::size_t permutations, std::uint64_t seed, std::size_t workers) {
  if (examples.empty()) throw InvariantError("mc_shapley needs at least one example");
  if (permutations == 0) throw InvariantError("mc_shapley needs at least one permutation");

  const std::size_t n = examples.size();
  const double empty_value = value(OrderedExampleSet{});

  std::vector<std::vector<double>> per_permutation(permutations);
  parallel_for(permutations, workers, [&](std::size_t p) {
    Rng rng(derive_seed(seed, "permutation", p));
    const auto order = rng.permutation(n);
    per_permutation[p] = walk_permutation(examples, value, order, empty_value);
  });

  ShapleyEstimate estimate;
  estimate.permutations_used = permutations;
  estimate.contributions.assign(n, {});
  estimate.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& deltas = estimate.contributions[i];
    deltas.reserve(permutations);
    for (const auto& marginal : per_permutation) deltas.push_back(marginal[i]);
    if (!deltas.empty()) {
      estimate.values[i] = std::accumulate(deltas.begin(), deltas.end(), 0.0) /
                           static_cast<double>(deltas.size());
    }
  }
  return estimate;
}

ShapleyEstimate mc_shapley(const OrderedExampleSet& examples, const EvalBatch& batch,
                           Evaluator& evaluator, const TaskSpec& task, UtilityCache& cache,
                           std::size_t permutations, std::uint64_t seed, std::size_t workers) {
  // Parallelism goes to the permutation walks; points are scored serially.
  const UtilityContext ctx{task, evaluator, cache, 1};
  return mc_shapley(examples, ctx.bind(batch), permutations, seed, workers);
}

std::vector<double> exact_shapley(const OrderedExampleSet& examples, const ValueFunction& value) {
  const std::size_t n = examples.size();
  if (n > kMaxExactShapleySize) {
    throw SizeError("exact Shapley enumeration is limited to " +
                    std::to_string(kMaxExactShapleySize) + " examples, got " + std::to_string(n));
  }
  std::vector<double> phi(n, 0.0);
  if (n == 0) return phi;

  const double empty_value = value(OrderedExampleSet{});
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t count = 0;
  do {
    const auto marginal = walk_permutation(examples, value, order, empty_value);
    for (std::size_t i = 0; i < n; ++i) phi[i] += marginal[i];
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));

  for (auto& v : phi) v /= static_cast<double>(count);
  return phi;
}

std::vector<double> exact_shapley(const OrderedExampleSet& examples, const EvalBatch& batch,
                                  Evaluator& evaluator, const TaskSpec& task,
                                  UtilityCache& cache) {
  const UtilityContext ctx{task, evaluator, cache, 1};
  return exact_shapley(examples, ctx.bind(batch));
}

std::size_t worst_index(std::span<const double> values) {
  if (values.empty()) throw InvariantError("worst_index needs at least one value");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

std::size_t worst_index(const ShapleyEstimate& estimate) { return worst_index(estimate.values); }

std::size_t loo_worst_index(const OrderedExampleSet& examples, const ValueFunction& value) {
  if (examples.empty()) throw InvariantError("loo_worst_index needs at least one example");
  std::size_t best = 0;
  double best_value = value(examples.without(0));
  for (std::size_t i = 1; i < examples.size(); ++i) {
    const double v = value(examples.without(i));
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  return best;
}

std::size_t loo_worst_index(const OrderedExampleSet& examples, const EvalBatch& batch,
                            Evaluator& evaluator, const TaskSpec& task, UtilityCache& cache) {
  const UtilityContext ctx{task, evaluator, cache, 1};
  return loo_worst_index(examples, ctx.bind(batch));
}

nlohmann::json shapley_report_json(const ShapleyEstimate& estimate,
                                   const OrderedExampleSet& examples) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < estimate.values.size(); ++i) {
    rows.push_back({{"index", i},
                    {"id", i < examples.size() ? examples[i].id : std::string{}},
                    {"value", estimate.values[i]},
                    {"contributions", estimate.contributions.at(i)}});
  }
  return {{"permutations", estimate.permutations_used},
          {"worst_index", estimate.values.empty() ? nlohmann::json(nullptr)
                                                  : nlohmann::json(worst_index(estimate))},
          {"examples", std::move(rows)}};
}

}  // namespace fewshot
