#include "fewshot_cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "fewshot/error.hpp"
#include "fewshot/io.hpp"
#include "fewshot/llm/mock.hpp"
#include "fewshot/llm/roles.hpp"
#include "fewshot/metrics.hpp"
#include "fewshot/parallel.hpp"
#include "fewshot/prompt.hpp"
#include "fewshot/shapley.hpp"
#include "fewshot_cli/dataset.hpp"

namespace fewshot::cli {
namespace {

namespace fs = std::filesystem;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

// The three role clients of a run, live or synthetic.
struct Backends {
  std::unique_ptr<llm::ChatClient> proposer_client;
  std::unique_ptr<llm::ChatClient> improver_client;
  std::unique_ptr<llm::ChatClient> evaluator_client;
  std::unique_ptr<llm::LlmProposer> proposer;
  std::unique_ptr<llm::LlmImprover> improver;
  std::unique_ptr<llm::LlmEvaluator> evaluator;
};

// `world` is the data the synthetic evaluator knows about.
Backends make_backends(const RunConfig& config, const Dataset& world) {
  Backends b;
  if (config.mock) {
    auto backend = std::make_shared<mock::SyntheticChatBackend>(config.task, world);
    const auto no_sleep = [](std::chrono::duration<double>) {};
    b.proposer_client = std::make_unique<llm::ChatClient>(config.proposer_endpoint, backend, no_sleep);
    b.improver_client = std::make_unique<llm::ChatClient>(config.improver_endpoint, backend, no_sleep);
    b.evaluator_client =
        std::make_unique<llm::ChatClient>(config.evaluator_endpoint, backend, no_sleep);
  } else {
    const auto client = [](const llm::EndpointConfig& endpoint) {
      return std::make_unique<llm::ChatClient>(endpoint,
                                               std::make_shared<llm::HttpChatBackend>(endpoint));
    };
    b.proposer_client = client(config.proposer_endpoint);
    b.improver_client = client(config.improver_endpoint);
    b.evaluator_client = client(config.evaluator_endpoint);
  }
  b.proposer = std::make_unique<llm::LlmProposer>(*b.proposer_client);
  b.improver = std::make_unique<llm::LlmImprover>(*b.improver_client);
  b.evaluator = std::make_unique<llm::LlmEvaluator>(*b.evaluator_client);
  return b;
}

Dataset load_split(const RunConfig& config, const std::string& split) {
  if (split == "train") return load_dataset(config.train_path, config.task.kind);
  if (split == "test") {
    if (!config.test_path) throw ConfigError("config has no data.test");
    return load_dataset(*config.test_path, config.task.kind);
  }
  throw ConfigError("unknown split: " + split + " (expected train or test)");
}

void ensure_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
}

// Evaluation batch used for one-off scoring: the first iteration's draw.
EvalBatch reference_batch(const RunConfig& config, const Dataset& train) {
  Rng rng(derive_seed(config.optimizer.seed, "batch", 0));
  return subsample(train, config.optimizer.s, rng);
}

EvalBatch batch_from_ids(const Dataset& dataset, const std::vector<std::string>& ids) {
  std::map<std::string, const DataPoint*> by_id;
  for (const auto& p : dataset) by_id.emplace(p.id, &p);
  std::vector<DataPoint> points;
  for (const auto& id : ids) points.push_back(*by_id.at(id));
  return EvalBatch(std::move(points));
}

template <typename Fn>
int guarded(std::ostream& err, fs::path* summary_path, Fn&& fn) {
  const auto fail = [&](int code, const std::string& what) {
    err << "error: " << what << "\n";
    if (summary_path && !summary_path->empty()) {
      try {
        write_file_atomic(*summary_path,
                          nlohmann::json{{"status", "failed"}, {"error", what}}.dump(2) + "\n");
      } catch (const std::exception&) {
      }
    }
    return code;
  };
  try {
    return fn();
  } catch (const ConfigError& e) {
    return fail(kExitConfig, e.what());
  } catch (const SizeError& e) {
    return fail(kExitConfig, e.what());
  } catch (const std::exception& e) {
    return fail(kExitFailure, e.what());
  }
}

}  // namespace

int cmd_optimize(const RunConfig& config, std::ostream& out, std::ostream& err) {
  fs::path summary_path;
  return guarded(err, &summary_path, [&] {
    const auto started = std::chrono::steady_clock::now();
    const Dataset train = load_dataset(config.train_path, config.task.kind);
    Backends backends = make_backends(config, train);

    ensure_output_dir(config.output_dir);
    const fs::path dir = config.output_dir;
    summary_path = dir / "summary.json";
    write_file_atomic(dir / "config.snapshot", to_json(config).dump(2) + "\n");

    std::ofstream runlog(dir / "runlog.jsonl", std::ios::binary | std::ios::trunc);
    if (!runlog) throw ConfigError("cannot write " + (dir / "runlog.jsonl").string());

    CountingEvaluator evaluator(*backends.evaluator);
    UtilityCache cache(config.cache_key_mode);
    const auto result = optimize_examples(
        config.optimizer, train, config.task, *backends.proposer, *backends.improver, evaluator,
        cache, [&](const IterationRecord& record) {
          runlog << to_json(record).dump() << '\n';
          runlog.flush();
        });
    runlog.close();
    if (!runlog) throw Error("failed writing runlog.jsonl");

    // Initial and final sets scored on the same batch: the last iteration's
    // merged batch, or the first draw when the loop was skipped.
    const auto& records = result.log.records;
    const EvalBatch batch = records.empty() ? reference_batch(config, train)
                                            : batch_from_ids(train, records.back().batch_ids);
    const UtilityContext ctx{config.task, evaluator, cache, config.optimizer.workers};
    const double initial_utility = ctx(result.log.initial, batch);
    const double final_utility = ctx(result.examples, batch);

    save_examples(dir / "examples.jsonl", result.examples);
    write_file_atomic(dir / "prompt.txt",
                      assemble_prompt(config.task, result.examples, "{input}") + "\n");

    std::map<std::string, std::size_t> decisions{{"replace", 0}, {"drop", 0}, {"keep", 0}};
    for (const auto& r : records) ++decisions[std::string(decision_name(r.decision.kind))];
    const auto cache_stats = cache.stats();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const nlohmann::json summary = {
        {"status", "ok"},
        {"seed", config.optimizer.seed},
        {"iterations", records.size()},
        {"initial_examples", result.log.initial.size()},
        {"final_examples", result.examples.size()},
        {"initial_utility", initial_utility},
        {"final_utility", final_utility},
        {"utility_batch_size", batch.size()},
        {"decisions", decisions},
        {"evaluator_calls", evaluator.calls()},
        {"cache", {{"hits", cache_stats.hits}, {"misses", cache_stats.misses},
                   {"entries", cache_stats.entries}}},
        {"wall_seconds", seconds}};
    write_file_atomic(summary_path, summary.dump(2) + "\n");
    out << summary.dump(2) << "\n";
    return 0;
  });
}

int cmd_eval(const RunConfig& config, const std::optional<fs::path>& examples_path,
             const std::string& split, std::ostream& out, std::ostream& err) {
  return guarded(err, nullptr, [&] {
    const auto path = examples_path.value_or(config.output_dir / "examples.jsonl");
    const OrderedExampleSet examples = load_examples(path);
    const Dataset data = load_split(config, split);
    Backends backends = make_backends(config, data);

    std::vector<std::string> predictions(data.size());
    std::vector<double> scores(data.size(), 0.0);
    parallel_for(data.size(), config.optimizer.workers, [&](std::size_t i) {
      predictions[i] =
          backends.evaluator->predict(assemble_prompt(config.task, examples, data[i].input));
      scores[i] = metrics::score(config.task, predictions[i], data[i]);
    });

    std::string lines;
    double total = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      total += scores[i];
      lines += nlohmann::json{{"id", data[i].id},
                              {"input", data[i].input},
                              {"prediction", predictions[i]},
                              {"score", scores[i]}}
                   .dump();
      lines += '\n';
    }
    const double mean = total / static_cast<double>(data.size());

    ensure_output_dir(config.output_dir);
    write_file_atomic(config.output_dir / ("eval_" + split + ".jsonl"), lines);
    const nlohmann::json summary = {{"split", split},
                                    {"examples", fs::absolute(path).string()},
                                    {"metric", metric_name(config.task.metric)},
                                    {"points", data.size()},
                                    {"mean_score", mean}};
    write_file_atomic(config.output_dir / ("eval_" + split + "_summary.json"),
                      summary.dump(2) + "\n");
    out << metric_name(config.task.metric) << " on " << split << " (" << data.size()
        << " points): " << mean << "\n";
    return 0;
  });
}

int cmd_shapley_report(const RunConfig& config, const std::optional<fs::path>& examples_path,
                       bool exact, std::ostream& out, std::ostream& err) {
  return guarded(err, nullptr, [&] {
    const auto path = examples_path.value_or(config.output_dir / "examples.jsonl");
    const OrderedExampleSet examples = load_examples(path);
    if (examples.empty()) throw ConfigError(path.string() + " holds no examples");
    if (exact && examples.size() > kMaxExactShapleySize) {
      throw SizeError("--exact supports at most " + std::to_string(kMaxExactShapleySize) +
                      " examples; " + path.string() + " has " + std::to_string(examples.size()));
    }
    const Dataset train = load_dataset(config.train_path, config.task.kind);
    Backends backends = make_backends(config, train);
    const EvalBatch batch = reference_batch(config, train);

    UtilityCache cache(config.cache_key_mode);
    const UtilityContext serial{config.task, *backends.evaluator, cache, 1};
    const auto value = serial.bind(batch);
    const auto estimate =
        mc_shapley(examples, value, config.optimizer.permutations,
                   derive_seed(config.optimizer.seed, "shapley", 0), config.optimizer.workers);
    std::vector<double> exact_values;
    if (exact) exact_values = exact_shapley(examples, value);

    auto report = shapley_report_json(estimate, examples);
    report["batch_ids"] = batch.ids();
    report["seed"] = config.optimizer.seed;
    if (exact) {
      report["exact"] = exact_values;
      report["exact_worst_index"] = worst_index(exact_values);
    }
    ensure_output_dir(config.output_dir);
    write_file_atomic(config.output_dir / "shapley_report.json", report.dump(2) + "\n");

    out << "Shapley report: " << examples.size() << " examples, P=" << estimate.permutations_used
        << " permutations, " << batch.size() << " points\n";
    out << std::left << std::setw(6) << "index" << std::setw(14) << "id" << std::setw(14)
        << "estimate";
    if (exact) out << "exact";
    out << "\n";
    for (std::size_t i = 0; i < examples.size(); ++i) {
      out << std::left << std::setw(6) << i << std::setw(14) << examples[i].id << std::setw(14)
          << estimate.values[i];
      if (exact) out << exact_values[i];
      out << "\n";
    }
    out << "worst index: " << worst_index(estimate);
    if (exact) out << " (exact: " << worst_index(exact_values) << ")";
    out << "\n";
    return 0;
  });
}

}  // namespace fewshot::cli
