#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

#include "fewshot/types.hpp"

namespace fewshot {

using TemplateValues = std::map<std::string, std::string, std::less<>>;

// Replaces every {NAME} placeholder (NAME = [A-Za-z_][A-Za-z0-9_]*) in a
// single pass; substituted text is never rescanned. A placeholder without a
// value throws InvariantError, so nothing unfilled reaches a model.
// Braces that do not form a placeholder are copied verbatim.
std::string render_template(std::string_view format, const TemplateValues& values);

// Placeholder names present in a template, in order of first appearance.
std::vector<std::string> template_placeholders(std::string_view format);

// One demonstration rendered with format.example_block; index is 1-based.
std::string render_example_block(const PromptFormat& format, const Example& example,
                                 std::size_t index);

// Instruction, then each example block numbered from 1 in set order, then
// the query block with the target left open. Blocks are separated by a blank
// line. An empty set gives the zero-shot prompt.
std::string assemble_prompt(const TaskSpec& task, const OrderedExampleSet& examples,
                            std::string_view query);

}  // namespace fewshot
