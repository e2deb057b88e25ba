#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fewshot/types.hpp"

namespace fewshot::llm {

enum class LengthBucket { very_short, medium, long_ };

std::string_view length_bucket_name(LengthBucket bucket);

struct Directive {
  int sentences = 1;  // 1..3
  LengthBucket length = LengthBucket::medium;
};

struct DiversityPlan {
  std::vector<Directive> directives;
  std::string text;
};

// Random sentence counts and length buckets, one directive per requested
// example. With two or more directives at least one is very short and at
// least one is long. Deterministic per seed.
DiversityPlan make_diversity_plan(std::size_t count, std::uint64_t seed);

// Built-in generator templates for a task kind.
std::string_view default_proposer_template(TaskKind kind);
std::string_view default_improver_template(TaskKind kind);

// One example in the layout the generator templates ask the model for:
//   Example3:
//   Sentence: "text"
//   Label: positive
// Inputs are always quoted, targets only for generation tasks.
std::string render_generator_block(const TaskSpec& task, const Example& example, std::size_t index);

// Least frequent label of the set among task.label_set, labels with no
// examples included. Ties go to the lexicographically smallest label.
std::string minority_label(const OrderedExampleSet& current, std::span<const std::string> label_set);

std::string render_proposer_prompt(const TaskSpec& task, std::size_t count,
                                   const DiversityPlan& plan);
std::string render_improver_prompt(const TaskSpec& task, const OrderedExampleSet& current,
                                   std::size_t count, const DiversityPlan& plan);

struct ParseOptions {
  std::string input_field = "Sentence";
  std::string target_field = "Label";
  // Accepted labels (classification); matched case- and punctuation-
  // insensitively and rewritten to the canonical spelling. Empty = any.
  std::vector<std::string> label_set;
  std::string id_prefix = "x";
  Origin origin = Origin::proposed;
};

ParseOptions parse_options(const TaskSpec& task, std::string id_prefix, Origin origin);

// Example blocks of a generator response, in textual order. Fence lines are
// ignored and numbering gaps tolerated. Blocks that are incomplete, carry a
// label outside the set, leak template text, or contain non-ASCII characters
// are skipped with a warning. At most expected_count examples are returned
// (0 = no limit); ids are id_prefix + 1-based position.
std::vector<Example> parse_examples(std::string_view text, std::size_t expected_count,
                                    const ParseOptions& options);

}  // namespace fewshot::llm
