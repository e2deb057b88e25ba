#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "fewshot_cli/config.hpp"

namespace fewshot::cli {

// Each command returns the process exit status and reports failures on err.

// Writes config.snapshot, examples.jsonl, prompt.txt, runlog.jsonl and
// summary.json into the output directory.
int cmd_optimize(const RunConfig& config, std::ostream& out, std::ostream& err);

// Scores a stored example set on a data split and writes eval_<split>.jsonl
// and eval_<split>_summary.json. Without examples_path the run's
// examples.jsonl is used.
int cmd_eval(const RunConfig& config, const std::optional<std::filesystem::path>& examples_path,
             const std::string& split, std::ostream& out, std::ostream& err);

// Per-example Shapley estimates on one training subsample, optionally with
// the exact values, written to shapley_report.json.
int cmd_shapley_report(const RunConfig& config,
                       const std::optional<std::filesystem::path>& examples_path, bool exact,
                       std::ostream& out, std::ostream& err);

// Entry point shared by the executable and the tests.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fewshot::cli
