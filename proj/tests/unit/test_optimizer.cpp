#include <gtest/gtest.h>

#include <set>

#include <nlohmann/json.hpp>

#include "../support/games.hpp"
#include "../support/scenario.hpp"
#include "fewshot/error.hpp"
#include "fewshot/log.hpp"
#include "fewshot/optimizer.hpp"

namespace fewshot {
namespace {

using testing::SyntheticWorld;

class Silence {
 public:
  Silence() : previous_(set_log_sink([](LogLevel, const std::string&) {})) {}
  ~Silence() { set_log_sink(previous_); }

 private:
  LogSink previous_;
};

TEST(Decide, WorkedExamples) {
  EXPECT_EQ(decide(0.70, 0.70, 0.70, 5), DecisionKind::replace);
  EXPECT_EQ(decide(0.70, 0.80, 0.75, 5), DecisionKind::drop);
  EXPECT_EQ(decide(0.70, 0.80, 0.75, 1), DecisionKind::keep);
}

TEST(Decide, KeepWhenBothAlternativesRegress) {
  EXPECT_EQ(decide(0.9, 0.5, 0.6, 4), DecisionKind::keep);
  EXPECT_EQ(decide(0.5, 0.5, 0.4, 4), DecisionKind::drop);
}

TEST(OptimizerConfig, DefaultsAndValidation) {
  const OptimizerConfig c;
  EXPECT_EQ(c.k, 16u);
  EXPECT_EQ(c.s, 70u);
  EXPECT_EQ(c.iterations, 15u);
  EXPECT_EQ(c.m, 10u);
  EXPECT_EQ(c.r, 5u);
  EXPECT_EQ(c.permutations, 3u);
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.r = 71;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.m = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(OptimizerConfig, JsonRoundTrip) {
  OptimizerConfig c;
  c.k = 4;
  c.selector = Selector::loo;
  c.placement = Placement::in_place;
  c.seed = 99;
  const auto back = optimizer_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_THROW(optimizer_config_from_json({{"selector", "random"}}), ConfigError);
  EXPECT_THROW(optimizer_config_from_json({{"k", "many"}}), ConfigError);
}

TEST(Subsample, ClampsAndIsDeterministic) {
  const auto data = testing::synthetic_points(3);
  Rng rng(1);
  EXPECT_EQ(subsample(data, 70, rng).size(), 3u);

  const auto big = testing::synthetic_points(100);
  Rng a(5), b(5);
  EXPECT_EQ(subsample(big, 10, a).ids(), subsample(big, 10, b).ids());

  Rng c(6);
  const auto ids = subsample(big, 100, c).ids();
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), 100u);

  Rng d(1);
  EXPECT_THROW(subsample({}, 5, d), ConfigError);
}

TEST(ReplayBuffer, UpdateAndDedup) {
  const EvalBatch batch(testing::synthetic_points(70));
  ReplayBuffer buffer;
  Rng rng(3);
  update_replay(buffer, batch, 5, rng);
  EXPECT_EQ(buffer.size(), 5u);
  update_replay(buffer, batch, 0, rng);
  EXPECT_EQ(buffer.size(), 5u);

  // Resampling a batch made of buffered points adds nothing.
  const EvalBatch buffered(buffer.points());
  update_replay(buffer, buffered, 5, rng);
  EXPECT_EQ(buffer.size(), 5u);
  EXPECT_FALSE(buffer.add(buffer.points().front()));
}

TEST(MergeWithReplay, FreshFirstThenBuffered) {
  const auto data = testing::synthetic_points(6);
  ReplayBuffer buffer;
  buffer.add(data[4]);
  buffer.add(data[0]);
  const EvalBatch fresh({data[0], data[1]});
  EXPECT_EQ(merge_with_replay(fresh, buffer).ids(), (std::vector<std::string>{"1", "2", "5"}));
}

TEST(Optimize, MockScenarioReachesFullUtility) {
  Silence quiet;
  SyntheticWorld world;
  UtilityCache cache;
  const OptimizerConfig config;
  const auto result = world.run(config, cache);
  ASSERT_EQ(result.log.records.size(), config.iterations);
  EXPECT_EQ(testing::count_tag(result.log.initial, "[bad]"), 8u);
  for (std::size_t t = 0; t < result.log.records.size(); ++t) {
    const auto& r = result.log.records[t];
    EXPECT_GE(r.utility_after, r.decision.a_base);
    EXPECT_GE(r.utility_after, 0.0);
    EXPECT_LE(r.utility_after, 1.0);
  }
  EXPECT_EQ(testing::count_tag(result.examples, "[bad]"), 0u);
  EXPECT_EQ(result.log.records.back().utility_after, 1.0);
  EXPECT_LE(result.examples.size(), config.k);
}

TEST(Optimize, SkipLoopReturnsProposals) {
  Silence quiet;
  SyntheticWorld world;
  UtilityCache cache;
  OptimizerConfig config;
  config.skip_loop = true;
  const auto result = world.run(config, cache);
  EXPECT_TRUE(result.log.records.empty());
  EXPECT_EQ(result.examples, result.log.initial);
  EXPECT_EQ(result.examples.size(), 16u);
  EXPECT_EQ(result.examples[0].id, "p1");
  EXPECT_EQ(result.examples[1].input_text, "[bad] proposed sample 2");
}

TEST(Optimize, ReplayInvariants) {
  Silence quiet;
  SyntheticWorld world(120);
  UtilityCache cache;
  OptimizerConfig config;
  config.iterations = 6;
  std::set<std::string> seen;
  const auto result = world.run(config, cache, [&](const IterationRecord& r) {
    for (const auto& id : r.batch_ids) seen.insert(id);
    EXPECT_LE(r.replay_ids.size(), (r.iteration + 1) * config.r);
    for (const auto& id : r.replay_ids) EXPECT_TRUE(seen.contains(id));
  });
  EXPECT_LE(result.replay.size(), config.iterations * config.r);
}

TEST(Optimize, DeterministicAcrossWorkers) {
  Silence quiet;
  const auto dump = [](std::size_t workers) {
    SyntheticWorld world;
    UtilityCache cache;
    OptimizerConfig config;
    config.iterations = 4;
    config.seed = 17;
    config.workers = workers;
    std::string out;
    world.run(config, cache, [&](const IterationRecord& r) { out += to_json(r).dump() + "\n"; });
    return out;
  };
  const auto one = dump(1);
  EXPECT_EQ(one, dump(1));
  EXPECT_EQ(one, dump(4));
}

TEST(Optimize, LooSelectorAlsoConverges) {
  Silence quiet;
  SyntheticWorld world;
  UtilityCache cache;
  OptimizerConfig config;
  config.selector = Selector::loo;
  const auto result = world.run(config, cache);
  for (const auto& r : result.log.records) EXPECT_FALSE(r.shapley.has_value());
  EXPECT_EQ(testing::count_tag(result.examples, "[bad]"), 0u);
}

TEST(Optimize, InPlacePlacementKeepsPosition) {
  Silence quiet;
  SyntheticWorld world;
  UtilityCache cache;
  OptimizerConfig config;
  config.iterations = 1;
  config.placement = Placement::in_place;
  const auto result = world.run(config, cache);
  const auto& r = result.log.records.at(0);
  ASSERT_EQ(r.decision.kind, DecisionKind::replace);
  EXPECT_EQ(result.examples[r.worst_index].id, r.decision.chosen_candidate->id);
}

TEST(Selectors, AgreeOnAdditiveUtility) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    std::vector<double> w(5);
    for (auto& x : w) x = rng.uniform01();
    const auto examples = testing::make_examples(5);
    const auto value = testing::additive_game(examples, w);
    EXPECT_EQ(worst_index(mc_shapley(examples, value, 3, seed)), loo_worst_index(examples, value));
  }
}

TEST(Optimize, ProposerFailureAborts) {
  Silence quiet;
  struct Broken final : ExampleProposer {
    OrderedExampleSet propose_initial(std::size_t, const TaskSpec&, std::uint64_t) override {
      throw GenerationError("no examples");
    }
  } broken;
  SyntheticWorld world;
  UtilityCache cache;
  EXPECT_THROW(optimize_examples({}, world.data, world.task, broken, *world.improver,
                                 *world.evaluator, cache),
               GenerationError);
}

TEST(IterationRecord, JsonFields) {
  Silence quiet;
  SyntheticWorld world;
  UtilityCache cache;
  OptimizerConfig config;
  config.iterations = 1;
  const auto result = world.run(config, cache);
  const auto json = to_json(result.log.records.at(0));
  for (const char* key : {"iteration", "batch_ids", "shapley", "worst_index", "worst_id",
                          "candidate_ids", "decision", "utility_after", "example_ids",
                          "replay_ids"}) {
    EXPECT_TRUE(json.contains(key)) << key;
  }
  EXPECT_EQ(json.at("decision").at("kind"), "replace");
  EXPECT_EQ(json.at("shapley").at("values").size(), 16u);
  EXPECT_EQ(json.at("batch_ids").size(), 70u);
}

}  // namespace
}  // namespace fewshot
