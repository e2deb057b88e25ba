#include "fewshot/io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fewshot/error.hpp"

namespace fewshot {

nlohmann::json example_to_json(const Example& example) {
  return {{"id", example.id},
          {"input_text", example.input_text},
          {"target_text", example.target_text},
          {"origin", origin_name(example.origin)}};
}

Example example_from_json(const nlohmann::json& json) {
  try {
    Example example{json.at("id").get<std::string>(), json.at("input_text").get<std::string>(),
                    json.at("target_text").get<std::string>(),
                    parse_origin(json.value("origin", std::string("manual")))};
    validate_example(example);
    return example;
  } catch (const nlohmann::json::exception& e) {
    throw InvariantError(std::string("bad example record: ") + e.what());
  }
}

std::string examples_to_jsonl(const OrderedExampleSet& examples) {
  std::string out;
  for (const auto& example : examples) {
    out += example_to_json(example).dump();
    out += '\n';
  }
  return out;
}

OrderedExampleSet examples_from_jsonl(std::string_view text) {
  std::vector<Example> items;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    try {
      items.push_back(example_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw InvariantError("line " + std::to_string(number) + ": " + e.what());
    } catch (const InvariantError& e) {
      throw InvariantError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return OrderedExampleSet(std::move(items));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ConfigError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

OrderedExampleSet load_examples(const std::filesystem::path& path) {
  return examples_from_jsonl(read_file(path));
}

void save_examples(const std::filesystem::path& path, const OrderedExampleSet& examples) {
  write_file_atomic(path, examples_to_jsonl(examples));
}

}  // namespace fewshot
