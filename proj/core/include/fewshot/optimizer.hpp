#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fewshot/roles.hpp"
#include "fewshot/rng.hpp"
#include "fewshot/shapley.hpp"
#include "fewshot/types.hpp"
#include "fewshot/utility.hpp"
#include "fewshot/utility_cache.hpp"

namespace fewshot {

enum class Selector { shapley, loo };
// Where the winning candidate goes: the end of the set, or the slot of the
// example it replaces.
enum class Placement { append, in_place };

std::string_view selector_name(Selector selector);
Selector parse_selector(std::string_view name);
std::string_view placement_name(Placement placement);
Placement parse_placement(std::string_view name);

struct OptimizerConfig {
  std::size_t k = 16;           // initial examples
  std::size_t s = 70;           // fresh points per iteration
  std::size_t iterations = 15;
  std::size_t m = 10;           // candidates per iteration
  std::size_t r = 5;            // points moved into the replay buffer per iteration
  std::size_t permutations = 3;
  Selector selector = Selector::shapley;
  bool skip_loop = false;  // keep the proposer's set as is
  Placement placement = Placement::append;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  // Throws ConfigError.
  void validate() const;
};

enum class DecisionKind { replace, drop, keep };

std::string_view decision_name(DecisionKind kind);

// replace iff a_best >= a_drop and a_best >= a_base; else drop iff
// a_drop >= a_base and the set has more than one example; else keep.
DecisionKind decide(double a_base, double a_drop, double a_best, std::size_t set_size);

struct Decision {
  DecisionKind kind = DecisionKind::keep;
  std::optional<std::size_t> replaced_index;
  std::optional<Example> chosen_candidate;
  double a_base = 0;
  double a_drop = 0;
  double a_best = 0;
};

// min(s, |dataset|) points drawn uniformly without replacement, in draw
// order. Throws ConfigError on an empty dataset.
EvalBatch subsample(const Dataset& dataset, std::size_t s, Rng& rng);

// Points kept from earlier batches, unique by id, in insertion order.
class ReplayBuffer {
 public:
  const std::vector<DataPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool contains(std::string_view id) const;
  // Returns false when a point with the same id is already stored.
  bool add(const DataPoint& point);

 private:
  std::vector<DataPoint> points_;
};

// Adds min(r, |batch|) points of the batch, drawn without replacement.
void update_replay(ReplayBuffer& buffer, const EvalBatch& batch, std::size_t r, Rng& rng);

// Fresh points followed by buffered points not already in the batch.
EvalBatch merge_with_replay(const EvalBatch& fresh, const ReplayBuffer& buffer);

struct IterationRecord {
  std::size_t iteration = 0;
  std::vector<std::string> batch_ids;
  std::optional<ShapleyEstimate> shapley;  // absent for the loo selector
  std::size_t worst_index = 0;
  std::string worst_id;
  std::vector<std::string> candidate_ids;
  Decision decision;
  double utility_after = 0;
  std::vector<std::string> example_ids;  // after the decision
  std::vector<std::string> replay_ids;   // after the update
};

struct RunLog {
  OptimizerConfig config;
  OrderedExampleSet initial;
  OrderedExampleSet final_set;
  std::vector<IterationRecord> records;
};

// Called after every finished iteration, e.g. to flush the record to disk.
using IterationObserver = std::function<void(const IterationRecord&)>;

struct OptimizeResult {
  OrderedExampleSet examples;
  RunLog log;
  ReplayBuffer replay;
};

// The replace/drop/keep loop. The proposer's set is the starting point;
// every iteration scores the set, its worst example removed, and each
// improver candidate in that slot on the same merged batch, then applies
// decide(). Proposed examples get ids p1..pk and candidates t<iteration>c<j>.
OptimizeResult optimize_examples(const OptimizerConfig& config, const Dataset& dataset,
                                 const TaskSpec& task, ExampleProposer& proposer,
                                 ExampleImprover& improver, Evaluator& evaluator,
                                 UtilityCache& cache, const IterationObserver& observer = {});

nlohmann::json to_json(const OptimizerConfig& config);
// Missing keys keep their defaults. Throws ConfigError on bad values.
OptimizerConfig optimizer_config_from_json(const nlohmann::json& json);
nlohmann::json to_json(const IterationRecord& record);

}  // namespace fewshot
