#include "fewshot/llm/roles.hpp"

#include <unordered_set>

#include "fewshot/error.hpp"
#include "fewshot/llm/templates.hpp"
#include "fewshot/log.hpp"
#include "fewshot/rng.hpp"

namespace fewshot::llm {

OrderedExampleSet LlmProposer::propose_initial(std::size_t k, const TaskSpec& task,
                                               std::uint64_t seed) {
  if (k == 0) throw InvariantError("proposer asked for zero examples");
  const auto options = parse_options(task, "p", Origin::proposed);
  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    const auto plan = make_diversity_plan(k, derive_seed(seed, "proposer-plan", attempt));
    const auto reply = client_.predict(render_proposer_prompt(task, k, plan), Role::proposer);
    auto examples = parse_examples(reply, k, options);
    if (examples.empty()) {
      log_warning("proposer reply had no usable examples (attempt " + std::to_string(attempt + 1) +
                  " of " + std::to_string(kGenerationAttempts) + ")");
      continue;
    }
    if (examples.size() < k) {
      log_warning("proposer returned " + std::to_string(examples.size()) + " of " +
                  std::to_string(k) + " examples");
    }
    return OrderedExampleSet(std::move(examples));
  }
  throw GenerationError("proposer produced no parseable examples after " +
                        std::to_string(kGenerationAttempts) + " attempts");
}

std::vector<Example> LlmImprover::improve_candidates(const OrderedExampleSet& current,
                                                     std::size_t m, const TaskSpec& task,
                                                     std::uint64_t seed) {
  if (m == 0) throw InvariantError("improver asked for zero candidates");
  const auto options = parse_options(task, "c", Origin::improved);
  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    const auto plan = make_diversity_plan(m, derive_seed(seed, "improver-plan", attempt));
    const auto reply =
        client_.predict(render_improver_prompt(task, current, m, plan), Role::improver);

    std::unordered_set<std::string> seen;
    for (const auto& example : current) seen.insert(example.input_text);
    std::vector<Example> candidates;
    for (auto& candidate : parse_examples(reply, m, options)) {
      if (!seen.insert(candidate.input_text).second) {
        log_warning("dropping improver candidate that repeats an existing input: " +
                    candidate.input_text);
        continue;
      }
      candidates.push_back(std::move(candidate));
    }
    if (candidates.empty()) {
      log_warning("improver reply had no usable candidates (attempt " +
                  std::to_string(attempt + 1) + " of " + std::to_string(kGenerationAttempts) + ")");
      continue;
    }
    if (candidates.size() < m) {
      log_warning("improver returned " + std::to_string(candidates.size()) + " of " +
                  std::to_string(m) + " candidates");
    }
    return candidates;
  }
  throw GenerationError("improver produced no usable candidates after " +
                        std::to_string(kGenerationAttempts) + " attempts");
}

}  // namespace fewshot::llm
