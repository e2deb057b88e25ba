#pragma once

// The synthetic half-good/half-bad world: proposals alternate "[good]" and
// "[bad]", improver candidates are all "[good]", and the evaluator is right
// on point j of N iff (j + 0.5) / N < share of good examples.

#include <chrono>
#include <memory>
#include <string>

#include "fewshot/llm/chat.hpp"
#include "fewshot/llm/mock.hpp"
#include "fewshot/llm/roles.hpp"
#include "fewshot/optimizer.hpp"

namespace fewshot::testing {

inline TaskSpec sentiment_task() {
  TaskSpec task;
  task.instruction = "Classify the sentiment of the sentence as positive or negative.";
  task.label_set = {"positive", "negative"};
  task.description = "binary sentiment";
  return task;
}

inline Dataset synthetic_points(std::size_t n) {
  Dataset data;
  for (std::size_t j = 0; j < n; ++j) {
    data.push_back({std::to_string(j + 1), "review number " + std::to_string(j),
                    std::string(j % 2 == 0 ? "positive" : "negative")});
  }
  return data;
}

struct SyntheticWorld {
  TaskSpec task;
  Dataset data;
  std::shared_ptr<mock::SyntheticChatBackend> backend;
  std::unique_ptr<llm::ChatClient> client;
  std::unique_ptr<llm::LlmProposer> proposer;
  std::unique_ptr<llm::LlmImprover> improver;
  std::unique_ptr<llm::LlmEvaluator> evaluator;

  explicit SyntheticWorld(std::size_t points = 200, TaskSpec spec = sentiment_task())
      : task(std::move(spec)), data(synthetic_points(points)) {
    backend = std::make_shared<mock::SyntheticChatBackend>(task, data);
    client = std::make_unique<llm::ChatClient>(llm::EndpointConfig{}, backend,
                                               [](std::chrono::duration<double>) {});
    proposer = std::make_unique<llm::LlmProposer>(*client);
    improver = std::make_unique<llm::LlmImprover>(*client);
    evaluator = std::make_unique<llm::LlmEvaluator>(*client);
  }

  OptimizeResult run(const OptimizerConfig& config, UtilityCache& cache,
                     const IterationObserver& observer = {}) {
    return optimize_examples(config, data, task, *proposer, *improver, *evaluator, cache, observer);
  }
};

inline std::size_t count_tag(const OrderedExampleSet& set, const std::string& tag) {
  std::size_t n = 0;
  for (const auto& e : set) n += e.input_text.find(tag) != std::string::npos ? 1 : 0;
  return n;
}

}  // namespace fewshot::testing
