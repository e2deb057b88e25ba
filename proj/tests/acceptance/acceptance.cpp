// Prints one PASS/FAIL/SKIP line per acceptance criterion and exits nonzero
// if any check fails. The live check runs only when FEWSHOT_LIVE_BASE_URL is
// set (optional: FEWSHOT_LIVE_MODEL, FEWSHOT_LIVE_API_KEY_ENV).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "../support/games.hpp"
#include "../support/scenario.hpp"
#include "fewshot/io.hpp"
#include "fewshot/llm/templates.hpp"
#include "fewshot/log.hpp"
#include "fewshot/metrics.hpp"
#include "fewshot/optimizer.hpp"
#include "fewshot/shapley.hpp"
#include "fewshot_cli/commands.hpp"
#include "fewshot_cli/config.hpp"

namespace fs = std::filesystem;
using namespace fewshot;

namespace {

struct Outcome {
  bool ok = true;
  bool skipped = false;
  std::string detail;
};

using Check = std::function<Outcome()>;

int failures = 0;

void run(int number, const std::string& title, double limit_seconds, const Check& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = check();
  } catch (const std::exception& e) {
    outcome = {false, false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!outcome.skipped && limit_seconds > 0 && seconds >= limit_seconds) {
    outcome.ok = false;
    outcome.detail += " (over the " + std::to_string(limit_seconds) + " s limit)";
  }
  const char* tag = outcome.skipped ? "SKIP" : outcome.ok ? "PASS" : "FAIL";
  if (!outcome.skipped && !outcome.ok) ++failures;
  std::ostringstream time;
  time.precision(3);
  time << std::fixed << seconds;
  std::cout << "[" << tag << "] " << number << ". " << title << " (" << time.str() << " s)";
  if (!outcome.detail.empty()) std::cout << ": " << outcome.detail;
  std::cout << std::endl;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

Outcome exact_oracle() {
  const auto fixture = testing::load_fixture("shapley_oracle.json");
  const auto examples = testing::make_examples(fixture.at("n").get<std::size_t>());
  double worst = 0;
  std::size_t tables = 0;
  for (const auto& table : fixture.at("tables")) {
    const auto phi = exact_shapley(examples, testing::table_game(examples, table.at("values")));
    const auto expected = table.at("phi").get<std::vector<double>>();
    for (std::size_t i = 0; i < phi.size(); ++i) worst = std::max(worst, std::abs(phi[i] - expected[i]));
    ++tables;
  }
  return {tables == 50 && worst <= 1e-12, false,
          std::to_string(tables) + " tables, max error " + fmt(worst)};
}

Outcome mc_convergence() {
  const auto examples = testing::make_examples(5);
  const auto value = testing::table_game(examples, testing::accuracy_like_table(5, 2024));
  const auto exact = exact_shapley(examples, value);
  const auto estimate = mc_shapley(examples, value, 200, 2024);
  double worst = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    worst = std::max(worst, std::abs(exact[i] - estimate.values[i]));
  }
  return {worst <= 0.05, false, "max |error| " + fmt(worst)};
}

Outcome argmin_agreement() {
  const auto examples = testing::make_examples(5);
  std::size_t agree = 0;
  std::size_t used = 0;
  for (std::uint64_t seed = 0; used < 100; ++seed) {
    const auto value = testing::table_game(examples, testing::accuracy_like_table(5, seed));
    auto exact = exact_shapley(examples, value);
    auto sorted = exact;
    std::sort(sorted.begin(), sorted.end());
    if (sorted[1] - sorted[0] < 0.1) continue;
    ++used;
    agree += worst_index(mc_shapley(examples, value, 50, seed)) == worst_index(exact) ? 1 : 0;
  }
  return {agree >= 95, false, std::to_string(agree) + "/100 agree"};
}

Outcome additive_exactness() {
  const auto examples = testing::make_examples(3);
  const auto value = testing::additive_game(examples, {0.1, 0.5, 0.2});
  double worst = 0;
  for (std::size_t p = 1; p <= 20; ++p) {
    const auto est = mc_shapley(examples, value, p, p);
    worst = std::max({worst, std::abs(est.values[0] - 0.1), std::abs(est.values[1] - 0.5),
                      std::abs(est.values[2] - 0.2)});
    if (worst_index(est) != 0) return {false, false, "worst index " + std::to_string(worst_index(est))};
  }
  return {worst <= 1e-12, false, "P=1..20, max error " + fmt(worst)};
}

Outcome call_budget() {
  testing::SyntheticWorld world(40);
  const auto examples = OrderedExampleSet({{"a", "[w=0.3] one", "positive", Origin::manual},
                                           {"b", "[w=0.1] two", "negative", Origin::manual},
                                           {"c", "[bad] three", "positive", Origin::manual},
                                           {"d", "[good] four", "negative", Origin::manual},
                                           {"e", "[w=0.2] five", "positive", Origin::manual}});
  const EvalBatch batch(world.data);
  mock::SyntheticEvaluator inner(world.task, world.data);
  CountingEvaluator counting(inner);
  const std::size_t permutations = 3;
  bool ok = true;
  std::size_t max_distinct = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    UtilityCache cache;
    mc_shapley(examples, batch, counting, world.task, cache, permutations, seed);
    max_distinct = std::max<std::size_t>(max_distinct, cache.stats().misses);
    ok = ok && cache.stats().misses <= permutations * examples.size() + 1;
  }
  UtilityCache cache;
  const UtilityContext ctx{world.task, counting, cache};
  ctx(examples, batch);
  const auto before = counting.calls();
  for (int i = 0; i < 5; ++i) ctx(examples, batch);
  const auto repeated = counting.calls() - before;
  ok = ok && repeated == 0 && cache.stats().hits == 5;
  return {ok, false,
          "max distinct coalitions " + std::to_string(max_distinct) + " <= " +
              std::to_string(permutations * examples.size() + 1) + ", repeated-query calls " +
              std::to_string(repeated)};
}

Outcome decision_table() {
  if (decide(0.70, 0.70, 0.70, 5) != DecisionKind::replace ||
      decide(0.70, 0.80, 0.75, 5) != DecisionKind::drop ||
      decide(0.70, 0.80, 0.75, 1) != DecisionKind::keep) {
    return {false, false, "worked examples differ"};
  }
  // Index = 9 * base + 3 * drop + best over the grid {0, 0.5, 1}.
  const std::string size1 = "RRRKRRKKRKRRKRRKKRKKRKKRKKR";
  const std::string size5 = "RRRDRRDDRKRRDRRDDRKKRKKRDDR";
  const double grid[] = {0.0, 0.5, 1.0};
  std::size_t checked = 3;
  for (const std::size_t size : {1u, 5u}) {
    const auto& table = size == 1 ? size1 : size5;
    for (int b = 0; b < 3; ++b) {
      for (int d = 0; d < 3; ++d) {
        for (int k = 0; k < 3; ++k) {
          const char want = table[9 * b + 3 * d + k];
          const auto got = decide(grid[b], grid[d], grid[k], size);
          const char have = got == DecisionKind::replace ? 'R' : got == DecisionKind::drop ? 'D' : 'K';
          if (have != want) {
            return {false, false,
                    "base " + fmt(grid[b]) + " drop " + fmt(grid[d]) + " best " + fmt(grid[k]) +
                        " size " + std::to_string(size)};
          }
          ++checked;
        }
      }
    }
  }
  return {true, false, std::to_string(checked) + " cases"};
}

struct MockRun {
  OptimizeResult result;
  std::set<std::string> seen;
};

MockRun mock_run() {
  testing::SyntheticWorld world;
  UtilityCache cache;
  MockRun run;
  run.result = world.run(OptimizerConfig{}, cache, [&](const IterationRecord& r) {
    run.seen.insert(r.batch_ids.begin(), r.batch_ids.end());
  });
  return run;
}

Outcome mock_convergence() {
  const auto run = mock_run();
  const auto& records = run.result.log.records;
  bool monotone = true;
  std::size_t reached = 0;
  for (const auto& r : records) {
    monotone = monotone && r.utility_after >= r.decision.a_base;
    if (reached == 0 && r.utility_after == 1.0) reached = r.iteration + 1;
  }
  const bool ok = records.size() == 15 && monotone && reached > 0 &&
                  records.back().utility_after == 1.0;
  return {ok, false,
          "utility 1.0 first at iteration " + std::to_string(reached) + " of " +
              std::to_string(records.size()) + ", non-regression " + (monotone ? "holds" : "broken")};
}

Outcome replay_invariants() {
  const auto run = mock_run();
  const OptimizerConfig config;
  const auto& buffer = run.result.replay;
  bool subset = true;
  std::set<std::string> ids;
  for (const auto& p : buffer.points()) {
    subset = subset && run.seen.contains(p.id);
    ids.insert(p.id);
  }
  const bool unique = ids.size() == buffer.size();

  // Forced resampling: a batch made only of buffered points adds nothing.
  ReplayBuffer copy = buffer;
  Rng rng(1);
  for (int i = 0; i < 10; ++i) update_replay(copy, EvalBatch(buffer.points()), config.r, rng);
  const bool dedup = copy.size() == buffer.size();
  const bool ok = buffer.size() <= config.iterations * config.r && subset && unique && dedup;
  return {ok, false,
          "buffer " + std::to_string(buffer.size()) + " <= " +
              std::to_string(config.iterations * config.r) + ", subset " + (subset ? "yes" : "no") +
              ", dedup " + (unique && dedup ? "yes" : "no")};
}

Outcome metric_golden() {
  using namespace metrics;
  using refs = std::vector<std::string>;
  const std::vector<std::pair<double, double>> rouge = {
      {rouge_n("the cat", refs{"the dog"}, 1), 0.5},
      {rouge_n("a b c", refs{"x y z"}, 2), 0.0},
      {rouge_l("a b c d", refs{"a c d"}), 6.0 / 7.0},
      {rouge_l("a b", refs{"x y"}), 0.0},
      {rouge_n("the quick fox", refs{"the quick fox"}, 2), 1.0},
      {rouge_l("the quick fox", refs{"the quick fox"}), 1.0},
  };
  double rouge_error = 0;
  for (const auto& [got, want] : rouge) rouge_error = std::max(rouge_error, std::abs(got - want));

  std::ifstream in(FEWSHOT_TEST_DATA_DIR "/sari_oracle.json");
  const auto cases = nlohmann::json::parse(in);
  double sari_error = 0;
  for (const auto& c : cases) {
    const double got = sari(c.at("source").get<std::string>(), c.at("candidate").get<std::string>(),
                            c.at("references").get<std::vector<std::string>>());
    sari_error = std::max(sari_error, std::abs(got - c.at("sari").get<double>()));
  }
  return {rouge_error <= 1e-9 && sari_error <= 0.1 && cases.size() == 3, false,
          "rouge max error " + fmt(rouge_error) + ", SARI max error " + fmt(sari_error) +
              " points over " + std::to_string(cases.size()) + " triples"};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fewshot_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_points(const fs::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& p : data) out << nlohmann::json{{"input", p.input}, {"label", p.label()}}.dump() << "\n";
}

Outcome determinism() {
  const auto dir = scratch_dir("determinism");
  write_points(dir / "train.jsonl", testing::synthetic_points(200));
  cli::RunConfig config;
  config.task = testing::sentiment_task();
  config.train_path = dir / "train.jsonl";
  config.mock = true;
  config.optimizer.seed = 42;
  std::vector<std::string> logs;
  for (const std::size_t workers : {1u, 4u, 1u}) {
    config.optimizer.workers = workers;
    config.output_dir = dir / ("w" + std::to_string(workers) + "_" + std::to_string(logs.size()));
    std::ostringstream out, err;
    if (cli::cmd_optimize(config, out, err) != 0) return {false, false, err.str()};
    logs.push_back(read_file(config.output_dir / "runlog.jsonl"));
  }
  fs::remove_all(dir);
  const bool ok = !logs[0].empty() && logs[0] == logs[1] && logs[0] == logs[2];
  return {ok, false, "runlog.jsonl " + std::to_string(logs[0].size()) + " bytes, workers 1/4/1 " +
                         (ok ? "identical" : "differ")};
}

Outcome template_round_trip() {
  auto generation = testing::sentiment_task();
  generation.kind = TaskKind::generation;
  generation.label_set.clear();
  generation.metric = MetricId::sari;
  generation.format = PromptFormat::defaults(TaskKind::generation);
  std::size_t recovered = 0;
  for (const auto& task : {testing::sentiment_task(), generation}) {
    std::vector<Example> items;
    std::string text;
    for (int i = 0; i < 16; ++i) {
      const bool classification = task.kind == TaskKind::classification;
      items.push_back({"e" + std::to_string(i),
                       "Sentence " + std::to_string(i) + ", with a comma and \"quotes\" inside.",
                       classification ? task.label_set[i % 2] : "Shorter " + std::to_string(i) + ".",
                       Origin::manual});
      text += llm::render_generator_block(task, items.back(), items.size()) + "\n\n";
    }
    const auto back = llm::parse_examples(text, 16, llm::parse_options(task, "r", Origin::proposed));
    if (back.size() != items.size()) break;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (back[i].input_text == items[i].input_text && back[i].target_text == items[i].target_text) {
        ++recovered;
      }
    }
  }
  return {recovered == 32, false, std::to_string(recovered) + "/32 pairs recovered"};
}

Outcome live_smoke() {
  const char* base_url = std::getenv("FEWSHOT_LIVE_BASE_URL");
  if (base_url == nullptr || *base_url == '\0') {
    return {true, true, "set FEWSHOT_LIVE_BASE_URL to run"};
  }
  const auto dir = scratch_dir("live");
  static const char* kSentences[] = {
      "a gorgeous, witty, seductive movie.", "the plot is nothing but boilerplate cliches.",
      "an utterly charming and hilarious film.", "it's a bore from start to finish.",
      "the acting is superb throughout.", "a tedious, lifeless mess.",
      "one of the most delightful films of the year.", "i could not wait for it to end.",
      "a moving and beautifully told story.", "clumsy direction and a weak script.",
      "the cast is wonderful and the jokes land.", "painfully slow and badly edited.",
      "a smart, funny, warm comedy.", "the dialogue is stiff and unconvincing.",
      "visually stunning and emotionally rich.", "an empty exercise in style.",
      "i left the theater smiling.", "a forgettable and derivative thriller.",
      "brilliantly acted and tightly plotted.", "the worst film i have seen in years."};
  Dataset data;
  for (std::size_t i = 0; i < 20; ++i) {
    data.push_back({std::to_string(i + 1), kSentences[i], std::string(i % 2 == 0 ? "positive" : "negative")});
  }
  write_points(dir / "train.jsonl", data);

  cli::RunConfig config;
  config.task = testing::sentiment_task();
  config.task.instruction = "Classify the sentiment of the movie review sentence as positive or negative.";
  config.train_path = dir / "train.jsonl";
  config.output_dir = dir / "run";
  config.optimizer.iterations = 3;
  config.optimizer.k = 8;
  config.optimizer.m = 4;
  config.optimizer.s = 20;
  config.optimizer.workers = 4;
  llm::EndpointConfig endpoint;
  endpoint.base_url = base_url;
  if (const char* model = std::getenv("FEWSHOT_LIVE_MODEL")) endpoint.model_name = model;
  if (const char* key = std::getenv("FEWSHOT_LIVE_API_KEY_ENV")) endpoint.api_key_env = key;
  config.proposer_endpoint = config.improver_endpoint = config.evaluator_endpoint = endpoint;

  std::ostringstream out, err;
  if (cli::cmd_optimize(config, out, err) != 0) return {false, false, err.str()};
  const auto summary = nlohmann::json::parse(read_file(config.output_dir / "summary.json"));
  const double initial = summary.at("initial_utility");
  const double final_utility = summary.at("final_utility");
  const bool ok = summary.at("iterations") == 3 && final_utility >= initial;
  return {ok, false, "initial " + fmt(initial) + ", final " + fmt(final_utility)};
}

}  // namespace

int main() {
  set_log_sink([](LogLevel, const std::string&) {});
  run(1, "exact Shapley matches brute-force oracle", 5, exact_oracle);
  run(2, "Monte-Carlo estimate converges (P=200, n=5)", 5, mc_convergence);
  run(3, "Monte-Carlo argmin agrees with exact (P=50)", 30, argmin_agreement);
  run(4, "additive utility is recovered exactly", 1, additive_exactness);
  run(5, "evaluation call budget and cache hits", 0, call_budget);
  run(6, "decision rule truth table", 0, decision_table);
  run(7, "mock scenario converges without regression", 10, mock_convergence);
  run(8, "replay buffer invariants", 0, replay_invariants);
  run(9, "metric golden values", 0, metric_golden);
  run(10, "runlog identical across worker counts", 0, determinism);
  run(11, "example block render/parse round trip", 0, template_round_trip);
  run(12, "live endpoint smoke run", 0, live_smoke);
  std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
