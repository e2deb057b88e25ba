#include <iostream>

#include <CLI11.hpp>

#include "fewshot/error.hpp"
#include "fewshot_cli/commands.hpp"

namespace fewshot::cli {

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Few-shot example optimizer"};
  app.require_subcommand(1);

  std::filesystem::path config_path;
  Overrides overrides;
  std::optional<std::filesystem::path> examples_path;
  std::string split = "test";
  bool exact = false;

  const auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
    cmd->add_option("--seed", overrides.seed, "Override optimizer.seed");
    cmd->add_option("--output", overrides.output_dir, "Override output_dir");
    cmd->add_option("--workers", overrides.workers, "Override optimizer.workers")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--mock", overrides.mock, "Use the offline synthetic backends");
  };

  auto* optimize = app.add_subcommand("optimize", "Optimize the example set");
  common(optimize);

  auto* eval = app.add_subcommand("eval", "Score an example set on a data split");
  common(eval);
  eval->add_option("--examples", examples_path, "Example set (default: <output>/examples.jsonl)");
  eval->add_option("--split", split, "train or test")->check(CLI::IsMember({"train", "test"}));

  auto* report = app.add_subcommand("shapley-report", "Per-example Shapley values");
  common(report);
  report->add_option("--examples", examples_path, "Example set (default: <output>/examples.jsonl)");
  report->add_flag("--exact", exact, "Also enumerate all permutations (at most 8 examples)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  RunConfig config;
  try {
    config = load_run_config(config_path);
    apply_overrides(config, overrides);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (optimize->parsed()) return cmd_optimize(config, out, err);
  if (eval->parsed()) return cmd_eval(config, examples_path, split, out, err);
  return cmd_shapley_report(config, examples_path, exact, out, err);
}

}  // namespace fewshot::cli
