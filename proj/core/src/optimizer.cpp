#include "fewshot/optimizer.hpp"

#include <algorithm>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "fewshot/error.hpp"
#include "fewshot/io.hpp"
#include "fewshot/log.hpp"
#include "fewshot/parallel.hpp"

namespace fewshot {

std::string_view selector_name(Selector selector) {
  return selector == Selector::loo ? "loo" : "shapley";
}

Selector parse_selector(std::string_view name) {
  if (name == "shapley") return Selector::shapley;
  if (name == "loo") return Selector::loo;
  throw ConfigError("unknown selector: " + std::string(name));
}

std::string_view placement_name(Placement placement) {
  return placement == Placement::in_place ? "in_place" : "append";
}

Placement parse_placement(std::string_view name) {
  if (name == "append") return Placement::append;
  if (name == "in_place") return Placement::in_place;
  throw ConfigError("unknown placement: " + std::string(name));
}

void OptimizerConfig::validate() const {
  const auto positive = [](std::size_t v, const char* name) {
    if (v < 1) throw ConfigError(std::string(name) + " must be at least 1");
  };
  positive(k, "k");
  positive(s, "s");
  positive(iterations, "iterations");
  positive(m, "m");
  positive(r, "r");
  positive(permutations, "permutations");
  positive(workers, "workers");
  if (r > s) throw ConfigError("replay size r must not exceed the subsample size s");
}

std::string_view decision_name(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::replace:
      return "replace";
    case DecisionKind::drop:
      return "drop";
    case DecisionKind::keep:
      return "keep";
  }
  return "keep";
}

DecisionKind decide(double a_base, double a_drop, double a_best, std::size_t set_size) {
  if (a_best >= a_drop && a_best >= a_base) return DecisionKind::replace;
  if (a_drop >= a_base && set_size > 1) return DecisionKind::drop;
  return DecisionKind::keep;
}

EvalBatch subsample(const Dataset& dataset, std::size_t s, Rng& rng) {
  if (dataset.empty()) throw ConfigError("cannot subsample an empty dataset");
  std::vector<DataPoint> points;
  for (const auto i : rng.sample_indices(dataset.size(), s)) points.push_back(dataset[i]);
  return EvalBatch(std::move(points));
}

bool ReplayBuffer::contains(std::string_view id) const {
  return std::any_of(points_.begin(), points_.end(),
                     [id](const DataPoint& p) { return p.id == id; });
}

bool ReplayBuffer::add(const DataPoint& point) {
  if (contains(point.id)) return false;
  points_.push_back(point);
  return true;
}

void update_replay(ReplayBuffer& buffer, const EvalBatch& batch, std::size_t r, Rng& rng) {
  for (const auto i : rng.sample_indices(batch.size(), r)) buffer.add(batch.points()[i]);
}

EvalBatch merge_with_replay(const EvalBatch& fresh, const ReplayBuffer& buffer) {
  std::vector<DataPoint> points = fresh.points();
  std::unordered_set<std::string> ids;
  for (const auto& p : points) ids.insert(p.id);
  for (const auto& p : buffer.points()) {
    if (ids.insert(p.id).second) points.push_back(p);
  }
  return EvalBatch(std::move(points));
}

OptimizeResult optimize_examples(const OptimizerConfig& config, const Dataset& dataset,
                                 const TaskSpec& task, ExampleProposer& proposer,
                                 ExampleImprover& improver, Evaluator& evaluator,
                                 UtilityCache& cache, const IterationObserver& observer) {
  config.validate();
  task.validate();
  if (dataset.empty()) throw ConfigError("training data is empty");

  std::vector<Example> proposed =
      proposer.propose_initial(config.k, task, derive_seed(config.seed, "proposer")).items();
  if (proposed.empty()) throw GenerationError("proposer returned no examples");
  if (proposed.size() > config.k) proposed.resize(config.k);
  for (std::size_t i = 0; i < proposed.size(); ++i) proposed[i].id = "p" + std::to_string(i + 1);

  OptimizeResult result;
  result.log.config = config;
  result.log.initial = OrderedExampleSet(std::move(proposed));
  OrderedExampleSet current = result.log.initial;

  const std::size_t rounds = config.skip_loop ? 0 : config.iterations;
  for (std::size_t t = 0; t < rounds; ++t) {
    IterationRecord record;
    record.iteration = t;

    Rng batch_rng(derive_seed(config.seed, "batch", t));
    const EvalBatch fresh = subsample(dataset, config.s, batch_rng);
    const EvalBatch batch = merge_with_replay(fresh, result.replay);
    record.batch_ids = batch.ids();

    // Single evaluations spread points over the workers; the Shapley walks
    // and candidate scoring are parallel themselves and score points serially.
    const ValueFunction value = UtilityContext{task, evaluator, cache, config.workers}.bind(batch);
    const ValueFunction serial_value = UtilityContext{task, evaluator, cache, 1}.bind(batch);

    Decision& decision = record.decision;
    decision.a_base = value(current);

    if (config.selector == Selector::shapley) {
      record.shapley = mc_shapley(current, serial_value, config.permutations,
                                  derive_seed(config.seed, "shapley", t), config.workers);
      record.worst_index = worst_index(*record.shapley);
    } else {
      record.worst_index = loo_worst_index(current, value);
    }
    record.worst_id = current[record.worst_index].id;

    const OrderedExampleSet rest = current.without(record.worst_index);
    decision.a_drop = value(rest);

    std::vector<Example> candidates =
        improver.improve_candidates(rest, config.m, task, derive_seed(config.seed, "improver", t));
    if (candidates.empty()) throw GenerationError("improver returned no candidates");
    if (candidates.size() > config.m) candidates.resize(config.m);
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      candidates[j].id = "t" + std::to_string(t) + "c" + std::to_string(j + 1);
      record.candidate_ids.push_back(candidates[j].id);
    }

    const auto with_candidate = [&](const Example& c) {
      return config.placement == Placement::in_place ? rest.with_inserted(record.worst_index, c)
                                                     : rest.with_appended(c);
    };
    std::vector<double> scores(candidates.size(), 0.0);
    parallel_for(candidates.size(), config.workers,
                 [&](std::size_t j) { scores[j] = serial_value(with_candidate(candidates[j])); });
    const auto best = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) -
                                               scores.begin());
    decision.a_best = scores[best];

    decision.kind = decide(decision.a_base, decision.a_drop, decision.a_best, current.size());
    switch (decision.kind) {
      case DecisionKind::replace:
        decision.replaced_index = record.worst_index;
        decision.chosen_candidate = candidates[best];
        current = with_candidate(candidates[best]);
        record.utility_after = decision.a_best;
        break;
      case DecisionKind::drop:
        decision.replaced_index = record.worst_index;
        current = rest;
        record.utility_after = decision.a_drop;
        break;
      case DecisionKind::keep:
        record.utility_after = decision.a_base;
        break;
    }
    if (record.utility_after < decision.a_base) {
      throw InvariantError("iteration " + std::to_string(t) + " lowered the batch utility");
    }

    Rng replay_rng(derive_seed(config.seed, "replay", t));
    update_replay(result.replay, fresh, config.r, replay_rng);
    for (const auto& p : result.replay.points()) record.replay_ids.push_back(p.id);
    record.example_ids = current.ids();

    log_info("iteration " + std::to_string(t + 1) + "/" + std::to_string(rounds) + ": " +
             std::string(decision_name(decision.kind)) + " " + record.worst_id + ", utility " +
             std::to_string(record.utility_after) + ", " + std::to_string(current.size()) +
             " examples");
    if (observer) observer(record);
    result.log.records.push_back(std::move(record));
  }

  result.log.final_set = current;
  result.examples = std::move(current);
  return result;
}

nlohmann::json to_json(const OptimizerConfig& config) {
  return {{"k", config.k},
          {"s", config.s},
          {"iterations", config.iterations},
          {"m", config.m},
          {"r", config.r},
          {"permutations", config.permutations},
          {"selector", selector_name(config.selector)},
          {"skip_loop", config.skip_loop},
          {"placement", placement_name(config.placement)},
          {"seed", config.seed},
          {"workers", config.workers}};
}

OptimizerConfig optimizer_config_from_json(const nlohmann::json& json) {
  if (!json.is_object()) throw ConfigError("optimizer config must be an object");
  OptimizerConfig config;
  try {
    config.k = json.value("k", config.k);
    config.s = json.value("s", config.s);
    config.iterations = json.value("iterations", config.iterations);
    config.m = json.value("m", config.m);
    config.r = json.value("r", config.r);
    config.permutations = json.value("permutations", config.permutations);
    config.selector = parse_selector(json.value("selector", std::string("shapley")));
    config.skip_loop = json.value("skip_loop", config.skip_loop);
    config.placement = parse_placement(json.value("placement", std::string("append")));
    config.seed = json.value("seed", config.seed);
    config.workers = json.value("workers", config.workers);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad optimizer config: ") + e.what());
  }
  config.validate();
  return config;
}

nlohmann::json to_json(const IterationRecord& record) {
  const auto& d = record.decision;
  nlohmann::json decision = {
      {"kind", decision_name(d.kind)},
      {"replaced_index", d.replaced_index ? nlohmann::json(*d.replaced_index) : nlohmann::json()},
      {"chosen_candidate",
       d.chosen_candidate ? example_to_json(*d.chosen_candidate) : nlohmann::json()},
      {"a_base", d.a_base},
      {"a_drop", d.a_drop},
      {"a_best", d.a_best}};
  nlohmann::json shapley;
  if (record.shapley) {
    shapley = {{"values", record.shapley->values},
               {"contributions", record.shapley->contributions},
               {"permutations", record.shapley->permutations_used}};
  }
  return {{"iteration", record.iteration},
          {"batch_ids", record.batch_ids},
          {"shapley", std::move(shapley)},
          {"worst_index", record.worst_index},
          {"worst_id", record.worst_id},
          {"candidate_ids", record.candidate_ids},
          {"decision", std::move(decision)},
          {"utility_after", record.utility_after},
          {"example_ids", record.example_ids},
          {"replay_ids", record.replay_ids}};
}

}  // namespace fewshot
