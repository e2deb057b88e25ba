#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fewshot/llm/chat.hpp"
#include "fewshot/roles.hpp"
#include "fewshot/utility.hpp"

namespace fewshot::llm {

// Attempts per proposer/improver call before giving up on unparseable output.
inline constexpr int kGenerationAttempts = 3;

class LlmProposer final : public ExampleProposer {
 public:
  explicit LlmProposer(ChatClient& client) : client_(client) {}

  // Throws GenerationError when no attempt yields a usable example.
  OrderedExampleSet propose_initial(std::size_t k, const TaskSpec& task,
                                    std::uint64_t seed) override;

 private:
  ChatClient& client_;
};

class LlmImprover final : public ExampleImprover {
 public:
  explicit LlmImprover(ChatClient& client) : client_(client) {}

  // Candidates repeating an input of the current set, or of an earlier
  // candidate, are dropped. Throws GenerationError when nothing is left
  // after every attempt.
  std::vector<Example> improve_candidates(const OrderedExampleSet& current, std::size_t m,
                                          const TaskSpec& task, std::uint64_t seed) override;

 private:
  ChatClient& client_;
};

class LlmEvaluator final : public Evaluator {
 public:
  explicit LlmEvaluator(ChatClient& client) : client_(client) {}

  std::string predict(const std::string& prompt) override {
    return client_.predict(prompt, Role::evaluator);
  }

 private:
  ChatClient& client_;
};

}  // namespace fewshot::llm
