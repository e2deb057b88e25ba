#include "fewshot/utility.hpp"

#include <algorithm>
#include <vector>

#include "fewshot/error.hpp"
#include "fewshot/metrics.hpp"
#include "fewshot/parallel.hpp"
#include "fewshot/prompt.hpp"

namespace fewshot {

double utility(const OrderedExampleSet& coalition, const EvalBatch& batch, Evaluator& evaluator,
               const TaskSpec& task, UtilityCache& cache, std::size_t workers) {
  if (batch.empty()) throw InvariantError("utility needs a non-empty batch");
  const std::string key = cache.key(coalition, batch.fingerprint());
  if (const auto hit = cache.lookup(key)) return *hit;

  const auto& points = batch.points();
  std::vector<double> scores(points.size(), 0.0);
  parallel_for(points.size(), workers, [&](std::size_t i) {
    const std::string prediction =
        evaluator.predict(assemble_prompt(task, coalition, points[i].input));
    scores[i] = metrics::unit_score(task, prediction, points[i]);
  });

  // Summed in batch order so the value does not depend on scheduling.
  double total = 0;
  for (const double s : scores) total += s;
  const double value = std::clamp(total / static_cast<double>(points.size()), 0.0, 1.0);
  cache.insert(key, value);
  return value;
}

}  // namespace fewshot
