#pragma once

#include <filesystem>
#include <string_view>

#include "fewshot/types.hpp"

namespace fewshot::cli {

// JSON lines of {"input", "label"} (classification, math) or
// {"input", "references": [...]} (generation). Ids are 1-based line numbers;
// blank lines are skipped but still counted. Errors name the offending line.
Dataset parse_dataset(std::string_view text, TaskKind kind, std::string_view source = "dataset");
Dataset load_dataset(const std::filesystem::path& path, TaskKind kind);

}  // namespace fewshot::cli
