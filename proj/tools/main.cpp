#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "routeplan/config.hpp"
#include "routeplan/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  long long parallelism = -1;
  long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "planner config file (JSON)")->required();
  cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--parallelism", args.parallelism,
                  "worker threads for the setup search (overrides config; 0 = all processors)");
  cmd->add_option("--seed", args.seed, "random seed (overrides config)");
}

routeplan::PlannerConfig load_with_overrides(const CommonArgs& args) {
  routeplan::PlannerConfig cfg = routeplan::load_config(args.config_path);
  if (args.parallelism >= 0) cfg.parallelism = static_cast<int>(args.parallelism);
  if (args.seed >= 0) cfg.seed = static_cast<uint64_t>(args.seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint resource-allocation and routing planner for multi-model serving"};
  app.require_subcommand(1);

  CommonArgs plan_args, sweep_args, check_args;
  CLI::App* plan = app.add_subcommand("plan", "solve for the best setup and routing split");
  add_common(plan, plan_args);
  CLI::App* sweep = app.add_subcommand("sweep", "score every retained setup and export a CSV");
  add_common(sweep, sweep_args);
  CLI::App* check = app.add_subcommand("check", "validate config and inputs without optimizing");
  add_common(check, check_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints help/usage; 0 for --help
    return code == 0 ? 0 : routeplan::kExitValidation;
  }

  try {
    if (plan->parsed())
      return routeplan::run_plan(load_with_overrides(plan_args), plan_args.out_dir, std::cerr);
    if (sweep->parsed())
      return routeplan::run_sweep(load_with_overrides(sweep_args), sweep_args.out_dir, std::cerr);
    return routeplan::run_check(load_with_overrides(check_args), std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return routeplan::kExitValidation;
  }
}
