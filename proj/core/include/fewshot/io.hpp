#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "fewshot/types.hpp"

namespace fewshot {

// {"id", "input_text", "target_text", "origin"}
nlohmann::json example_to_json(const Example& example);
// Throws InvariantError on missing fields or bad values.
Example example_from_json(const nlohmann::json& json);

// One example per line, in set order.
std::string examples_to_jsonl(const OrderedExampleSet& examples);
OrderedExampleSet examples_from_jsonl(std::string_view text);

// Throws ConfigError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

OrderedExampleSet load_examples(const std::filesystem::path& path);
void save_examples(const std::filesystem::path& path, const OrderedExampleSet& examples);

}  // namespace fewshot
