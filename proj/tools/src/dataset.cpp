#include "fewshot_cli/dataset.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "fewshot/error.hpp"
#include "fewshot/io.hpp"

namespace fewshot::cli {

Dataset parse_dataset(std::string_view text, TaskKind kind, std::string_view source) {
  Dataset dataset;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto where = std::string(source) + ":" + std::to_string(number) + ": ";
    const auto record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded()) throw ConfigError(where + "malformed JSON");
    if (!record.is_object()) throw ConfigError(where + "expected a JSON object");
    try {
      DataPoint point;
      point.id = std::to_string(number);
      point.input = record.at("input").get<std::string>();
      if (trim(point.input).empty()) throw ConfigError(where + "empty input");
      if (kind == TaskKind::generation) {
        if (record.contains("references")) {
          point.gold = record.at("references").get<std::vector<std::string>>();
        } else {
          point.gold = std::vector<std::string>{record.at("label").get<std::string>()};
        }
      } else {
        const auto& label = record.at("label");
        point.gold = label.is_string() ? label.get<std::string>() : label.dump();
      }
      validate_point(point);
      dataset.push_back(std::move(point));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where + e.what());
    } catch (const InvariantError& e) {
      throw ConfigError(where + e.what());
    }
  }
  if (dataset.empty()) throw ConfigError(std::string(source) + " has no records");
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path, TaskKind kind) {
  return parse_dataset(read_file(path), kind, path.string());
}

}  // namespace fewshot::cli
