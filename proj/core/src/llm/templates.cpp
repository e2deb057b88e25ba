#include "fewshot/llm/templates.hpp"

#include <algorithm>
#include <map>
#include <regex>

#include "fewshot/error.hpp"
#include "fewshot/log.hpp"
#include "fewshot/metrics.hpp"
#include "fewshot/prompt.hpp"
#include "fewshot/rng.hpp"

namespace fewshot::llm {
namespace {

constexpr std::string_view kClassificationProposer =
    R"(You are a data generator that writes high-quality in-context learning examples for {TASK_DESCRIPTION}. Create exactly {NUM_EXAMPLES} training examples in THIS STRICT format only:

Example1:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: {LABEL}

Example2:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: {LABEL}

...
Example{NUM_EXAMPLES}:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: {LABEL}

Diversity plan (MUST FOLLOW):
{DIVERSITY_PLAN}

Rules:
- Each example's "{INPUT_FIELD}" must contain exactly the number of sentences specified above (1-3).
- Keep sentences concise: typically 3-14 words each. Across the set, include at least one very short (<= 5 words) and one longer (10-14 words).
- Use only ASCII characters. Do NOT include double quotes inside the text.
- Use exactly ONE `{INPUT_FIELD}:` line per example; if multiple sentences are needed, put them inside the same quotes separated by a space.
- Make the writing naturally match the requested label in the everyday sense of the word.
- Do NOT mention the label or talk about labels in the text (no meta commentary).
- No Markdown/code fences.
- Output ONLY the examples in the exact format above; no extra text.)";

constexpr std::string_view kClassificationImprover =
    R"(You are improving in-context examples for {TASK_DESCRIPTION}. Generate replacements that diversify length (1-3 sentences) and topic, avoid paraphrasing, and help the task.

You are given the CURRENT examples (do not repeat or paraphrase them):
{CURRENT_EXAMPLES}

Now create exactly {NUM_CANDIDATES} NEW examples in THIS STRICT format:

Example1:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: {LABEL}

Example2:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: {LABEL}

...
Example{NUM_CANDIDATES}:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: {LABEL}

Diversity plan (MUST FOLLOW):
{DIVERSITY_PLAN}

Rules:
- Use exactly ONE `{INPUT_FIELD}:` line per example. If multiple sentences are needed, put them INSIDE the same quotes separated by a space.
- Each example must have exactly the number of sentences specified in the plan above (1-3).
- Keep sentences concise: typically 3-14 words each. Across the set, include very short (<= 5 words) and longer (10-14 words).
- ASCII only. Do NOT include double quotes inside the text.
- Make topics clearly different from the given examples and from each other; avoid near-duplicates or paraphrases.
- Prefer balancing labels; if unsure, choose the minority label: {MINORITY_LABEL}.
- Do NOT wrap output in Markdown/code fences.
- Output ONLY the examples in the exact format above; no extra text.)";

constexpr std::string_view kGenerationProposer =
    R"(You are a data generator that writes high-quality in-context learning examples for {TASK_DESCRIPTION}. Create exactly {NUM_EXAMPLES} training examples in THIS STRICT format only:

Example1:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: "<text>"

Example2:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: "<text>"

...
Example{NUM_EXAMPLES}:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: "<text>"

Diversity plan (MUST FOLLOW):
{DIVERSITY_PLAN}

Rules:
- Each example's "{INPUT_FIELD}" must contain exactly the number of sentences specified above (1-3).
- Keep sentences concise: typically 3-14 words each. Across the set, include at least one very short (<= 5 words) and one longer (10-14 words).
- Each "{TARGET_FIELD}" must be a faithful, shorter or simpler rewrite of its "{INPUT_FIELD}" on a single line.
- Use only ASCII characters. Do NOT include double quotes inside the text.
- Use exactly ONE `{INPUT_FIELD}:` line and ONE `{TARGET_FIELD}:` line per example.
- No Markdown/code fences.
- Output ONLY the examples in the exact format above; no extra text.)";

constexpr std::string_view kGenerationImprover =
    R"(You are improving in-context examples for {TASK_DESCRIPTION}. Generate replacements that diversify length (1-3 sentences) and topic, avoid paraphrasing, and help the task.

You are given the CURRENT examples (do not repeat or paraphrase them):
{CURRENT_EXAMPLES}

Now create exactly {NUM_CANDIDATES} NEW examples in THIS STRICT format:

Example1:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: "<text>"

Example2:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: "<text>"

...
Example{NUM_CANDIDATES}:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: "<text>"

Diversity plan (MUST FOLLOW):
{DIVERSITY_PLAN}

Rules:
- Use exactly ONE `{INPUT_FIELD}:` line and ONE `{TARGET_FIELD}:` line per example.
- Each "{INPUT_FIELD}" must have exactly the number of sentences specified in the plan above (1-3).
- Each "{TARGET_FIELD}" must be a faithful, shorter or simpler rewrite of its "{INPUT_FIELD}".
- ASCII only. Do NOT include double quotes inside the text.
- Make topics clearly different from the given examples and from each other; avoid near-duplicates or paraphrases.
- Do NOT wrap output in Markdown/code fences.
- Output ONLY the examples in the exact format above; no extra text.)";

constexpr std::string_view kMathProposer =
    R"(You are a data generator that writes high-quality in-context learning examples for {TASK_DESCRIPTION}. Create exactly {NUM_EXAMPLES} training examples in THIS STRICT format only:

Example1:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: <worked solution ending with the final number>

Example2:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: <worked solution ending with the final number>

...
Example{NUM_EXAMPLES}:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: <worked solution ending with the final number>

Diversity plan (MUST FOLLOW):
{DIVERSITY_PLAN}

Rules:
- Each "{INPUT_FIELD}" must contain exactly the number of sentences specified above (1-3).
- Each "{TARGET_FIELD}" is a short solution on a single line whose last number is the correct answer.
- Use only ASCII characters. Do NOT include double quotes inside the text.
- No Markdown/code fences.
- Output ONLY the examples in the exact format above; no extra text.)";

constexpr std::string_view kMathImprover =
    R"(You are improving in-context examples for {TASK_DESCRIPTION}. Generate replacements that diversify length (1-3 sentences) and topic, avoid paraphrasing, and help the task.

You are given the CURRENT examples (do not repeat or paraphrase them):
{CURRENT_EXAMPLES}

Now create exactly {NUM_CANDIDATES} NEW examples in THIS STRICT format:

Example1:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: <worked solution ending with the final number>

...
Example{NUM_CANDIDATES}:
{INPUT_FIELD}: "<text>"
{TARGET_FIELD}: <worked solution ending with the final number>

Diversity plan (MUST FOLLOW):
{DIVERSITY_PLAN}

Rules:
- Each "{INPUT_FIELD}" must have exactly the number of sentences specified in the plan above (1-3).
- Each "{TARGET_FIELD}" is a short solution on a single line whose last number is the correct answer.
- ASCII only. Do NOT include double quotes inside the text.
- Make topics clearly different from the given examples and from each other.
- Do NOT wrap output in Markdown/code fences.
- Output ONLY the examples in the exact format above; no extra text.)";

std::string default_description(const TaskSpec& task) {
  if (!task.description.empty()) return task.description;
  switch (task.kind) {
    case TaskKind::classification:
      return "text classification";
    case TaskKind::generation:
      return "text rewriting";
    case TaskKind::math:
      return "math word problems";
  }
  return "the task";
}

std::string join_labels(std::span<const std::string> labels) {
  std::string out;
  for (const auto& label : labels) {
    if (!out.empty()) out += '|';
    out += label;
  }
  return out;
}

TemplateValues common_values(const TaskSpec& task, const DiversityPlan& plan) {
  return {{"TASK_DESCRIPTION", default_description(task)},
          {"INSTRUCTION", task.instruction},
          {"INPUT_FIELD", task.format.input_field},
          {"TARGET_FIELD", task.format.target_field},
          {"LABEL", join_labels(task.label_set)},
          {"DIVERSITY_PLAN", plan.text}};
}

std::string bucket_text(LengthBucket bucket) {
  switch (bucket) {
    case LengthBucket::very_short:
      return "very short (at most 5 words per sentence)";
    case LengthBucket::medium:
      return "medium (6-9 words per sentence)";
    case LengthBucket::long_:
      return "long (10-14 words per sentence)";
  }
  return {};
}

bool is_ascii(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

// Strips surrounding straight and curly double quotes, repeatedly.
std::string unquote(std::string_view raw) {
  std::string text = trim(raw);
  for (;;) {
    bool changed = false;
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
      text = trim(std::string_view(text).substr(1, text.size() - 2));
      changed = true;
    }
    constexpr std::string_view kOpen = "\xE2\x80\x9C";
    constexpr std::string_view kClose = "\xE2\x80\x9D";
    if (text.size() >= 6 && text.starts_with(kOpen) && text.ends_with(kClose)) {
      text = trim(std::string_view(text).substr(3, text.size() - 6));
      changed = true;
    }
    if (!changed) return text;
  }
}

// Value after "<field>:" when the line starts with that field name.
std::optional<std::string> field_value(std::string_view line, std::string_view field) {
  const std::string trimmed = trim(line);
  if (trimmed.size() <= field.size() || !trimmed.starts_with(field)) return std::nullopt;
  std::size_t pos = field.size();
  while (pos < trimmed.size() && (trimmed[pos] == ' ' || trimmed[pos] == '\t')) ++pos;
  if (pos >= trimmed.size() || trimmed[pos] != ':') return std::nullopt;
  return trimmed.substr(pos + 1);
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::string_view length_bucket_name(LengthBucket bucket) {
  switch (bucket) {
    case LengthBucket::very_short:
      return "very_short";
    case LengthBucket::medium:
      return "medium";
    case LengthBucket::long_:
      return "long";
  }
  return "medium";
}

DiversityPlan make_diversity_plan(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw InvariantError("diversity plan needs at least one directive");
  Rng rng(seed);
  DiversityPlan plan;
  plan.directives.resize(count);
  for (auto& d : plan.directives) {
    d.sentences = 1 + static_cast<int>(rng.uniform_index(3));
    d.length = static_cast<LengthBucket>(rng.uniform_index(3));
  }
  if (count >= 2) {
    const auto has = [&](LengthBucket b) {
      return std::any_of(plan.directives.begin(), plan.directives.end(),
                         [b](const Directive& d) { return d.length == b; });
    };
    const auto count_of = [&](LengthBucket b) {
      return std::count_if(plan.directives.begin(), plan.directives.end(),
                           [b](const Directive& d) { return d.length == b; });
    };
    // Overwrite a random directive whose bucket is not the other required one
    // (or is a surplus copy of it).
    const auto force = [&](LengthBucket want, LengthBucket keep) {
      std::vector<std::size_t> slots;
      for (std::size_t i = 0; i < count; ++i) {
        if (plan.directives[i].length != keep || count_of(keep) > 1) slots.push_back(i);
      }
      plan.directives[slots[rng.uniform_index(slots.size())]].length = want;
    };
    if (!has(LengthBucket::very_short)) force(LengthBucket::very_short, LengthBucket::long_);
    if (!has(LengthBucket::long_)) force(LengthBucket::long_, LengthBucket::very_short);
  }
  for (std::size_t i = 0; i < count; ++i) {
    const auto& d = plan.directives[i];
    if (i > 0) plan.text += '\n';
    plan.text += "- Example" + std::to_string(i + 1) + ": " + std::to_string(d.sentences) +
                 (d.sentences == 1 ? " sentence, " : " sentences, ") + bucket_text(d.length);
  }
  return plan;
}

std::string_view default_proposer_template(TaskKind kind) {
  switch (kind) {
    case TaskKind::classification:
      return kClassificationProposer;
    case TaskKind::generation:
      return kGenerationProposer;
    case TaskKind::math:
      return kMathProposer;
  }
  return kClassificationProposer;
}

std::string_view default_improver_template(TaskKind kind) {
  switch (kind) {
    case TaskKind::classification:
      return kClassificationImprover;
    case TaskKind::generation:
      return kGenerationImprover;
    case TaskKind::math:
      return kMathImprover;
  }
  return kClassificationImprover;
}

std::string render_generator_block(const TaskSpec& task, const Example& example, std::size_t index) {
  std::string block = "Example" + std::to_string(index) + ":\n";
  block += task.format.input_field + ": \"" + example.input_text + "\"\n";
  block += task.format.target_field + ": ";
  if (task.kind == TaskKind::generation) {
    block += "\"" + example.target_text + "\"";
  } else {
    block += example.target_text;
  }
  return block;
}

std::string minority_label(const OrderedExampleSet& current, std::span<const std::string> label_set) {
  if (label_set.empty()) throw InvariantError("minority label needs a label set");
  std::map<std::string, std::size_t> counts;
  for (const auto& label : label_set) counts[label] = 0;
  for (const auto& example : current) {
    if (auto it = counts.find(example.target_text); it != counts.end()) ++it->second;
  }
  // std::map iterates in lexicographic order, so the first minimum wins ties.
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second < best->second) best = it;
  }
  return best->first;
}

std::string render_proposer_prompt(const TaskSpec& task, std::size_t count,
                                   const DiversityPlan& plan) {
  auto values = common_values(task, plan);
  values["NUM_EXAMPLES"] = std::to_string(count);
  const std::string_view tmpl = task.proposer_template.empty()
                                    ? default_proposer_template(task.kind)
                                    : std::string_view(task.proposer_template);
  return render_template(tmpl, values);
}

std::string render_improver_prompt(const TaskSpec& task, const OrderedExampleSet& current,
                                   std::size_t count, const DiversityPlan& plan) {
  auto values = common_values(task, plan);
  values["NUM_CANDIDATES"] = std::to_string(count);
  std::string blocks;
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (i > 0) blocks += "\n\n";
    blocks += render_generator_block(task, current[i], i + 1);
  }
  values["CURRENT_EXAMPLES"] = blocks;
  if (task.kind == TaskKind::classification) {
    values["MINORITY_LABEL"] = minority_label(current, task.label_set);
  }
  const std::string_view tmpl = task.improver_template.empty()
                                    ? default_improver_template(task.kind)
                                    : std::string_view(task.improver_template);
  return render_template(tmpl, values);
}

ParseOptions parse_options(const TaskSpec& task, std::string id_prefix, Origin origin) {
  ParseOptions options;
  options.input_field = task.format.input_field;
  options.target_field = task.format.target_field;
  options.label_set = task.label_set;
  options.id_prefix = std::move(id_prefix);
  options.origin = origin;
  return options;
}

std::vector<Example> parse_examples(std::string_view text, std::size_t expected_count,
                                    const ParseOptions& options) {
  static const std::regex kHeader(R"(^\s*\**\s*Example\s*(\d+)\s*:\**\s*(.*)$)");

  struct Block {
    std::string number;
    std::vector<std::string> lines;
  };
  std::vector<Block> blocks;
  for (const auto& line : split_lines(text)) {
    if (trim(line).starts_with("```")) continue;
    std::smatch match;
    if (std::regex_match(line, match, kHeader)) {
      blocks.push_back({match[1].str(), {}});
      if (const auto rest = trim(match[2].str()); !rest.empty()) blocks.back().lines.push_back(rest);
      continue;
    }
    if (!blocks.empty()) blocks.back().lines.push_back(line);
  }

  std::vector<std::string> canonical;
  std::vector<std::string> normalized;
  for (const auto& label : options.label_set) {
    canonical.push_back(label);
    normalized.push_back(metrics::normalize_label(label));
  }

  std::vector<Example> out;
  for (const auto& block : blocks) {
    if (expected_count > 0 && out.size() >= expected_count) break;
    const auto skip = [&](const std::string& why) {
      log_warning("skipping generated Example" + block.number + ": " + why);
    };
    std::optional<std::string> input;
    std::optional<std::string> target;
    for (const auto& line : block.lines) {
      if (!input) {
        if (auto v = field_value(line, options.input_field)) {
          input = unquote(*v);
          continue;
        }
      }
      if (!target) {
        if (auto v = field_value(line, options.target_field)) target = unquote(*v);
      }
    }
    if (!input || input->empty()) {
      skip("missing " + options.input_field + " line");
      continue;
    }
    if (!target || target->empty()) {
      skip("missing " + options.target_field + " line");
      continue;
    }
    if (*input == "<text>" || *target == "<text>" || target->find('|') != std::string::npos) {
      skip("template text copied into the output");
      continue;
    }
    if (!is_ascii(*input) || !is_ascii(*target)) {
      skip("non-ASCII characters");
      continue;
    }
    if (!canonical.empty()) {
      const auto norm = metrics::normalize_label(*target);
      const auto it = std::find(normalized.begin(), normalized.end(), norm);
      if (it == normalized.end()) {
        skip("label '" + *target + "' is not in the label set");
        continue;
      }
      *target = canonical[static_cast<std::size_t>(it - normalized.begin())];
    }
    out.push_back(Example{options.id_prefix + std::to_string(out.size() + 1), std::move(*input),
                          std::move(*target), options.origin});
  }
  return out;
}

}  // namespace fewshot::llm
