#include "fewshot/prompt.hpp"

#include <algorithm>
#include <cctype>

#include "fewshot/error.hpp"

namespace fewshot {
namespace {

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Length of the placeholder starting at format[pos] == '{', or 0.
std::size_t placeholder_length(std::string_view format, std::size_t pos) {
  std::size_t end = pos + 1;
  if (end >= format.size() || !is_name_start(format[end])) return 0;
  while (end < format.size() && is_name_char(format[end])) ++end;
  if (end >= format.size() || format[end] != '}') return 0;
  return end - pos + 1;
}

}  // namespace

std::string render_template(std::string_view format, const TemplateValues& values) {
  std::string out;
  out.reserve(format.size());
  std::size_t pos = 0;
  while (pos < format.size()) {
    if (format[pos] == '{') {
      if (const auto len = placeholder_length(format, pos); len > 0) {
        const auto name = format.substr(pos + 1, len - 2);
        const auto it = values.find(name);
        if (it == values.end()) {
          throw InvariantError("template placeholder {" + std::string(name) + "} has no value");
        }
        out += it->second;
        pos += len;
        continue;
      }
    }
    out += format[pos++];
  }
  return out;
}

std::vector<std::string> template_placeholders(std::string_view format) {
  std::vector<std::string> names;
  for (std::size_t pos = 0; pos < format.size(); ++pos) {
    if (format[pos] != '{') continue;
    if (const auto len = placeholder_length(format, pos); len > 0) {
      std::string name(format.substr(pos + 1, len - 2));
      if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
      pos += len - 1;
    }
  }
  return names;
}

std::string render_example_block(const PromptFormat& format, const Example& example,
                                 std::size_t index) {
  return render_template(format.example_block, {{"index", std::to_string(index)},
                                                {"input_field", format.input_field},
                                                {"input", example.input_text},
                                                {"target_field", format.target_field},
                                                {"target", example.target_text}});
}

std::string assemble_prompt(const TaskSpec& task, const OrderedExampleSet& examples,
                            std::string_view query) {
  if (trim(query).empty()) throw InvariantError("query must be non-empty");
  std::string prompt;
  if (!task.instruction.empty()) prompt = task.instruction + "\n\n";
  for (std::size_t i = 0; i < examples.size(); ++i) {
    prompt += render_example_block(task.format, examples[i], i + 1);
    prompt += "\n\n";
  }
  prompt += render_template(task.format.query_block, {{"input_field", task.format.input_field},
                                                      {"input", std::string(query)},
                                                      {"target_field", task.format.target_field}});
  return prompt;
}

}  // namespace fewshot
