#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "routeplan/types.hpp"
#include "routeplan/workload.hpp"

namespace routeplan {

struct ModelConfig {
  std::string name;
  std::vector<int> tp_choices;
  std::vector<double> rho_choices;
  std::optional<BetaShape> score_beta;  // required when scores are synthetic
};

struct OptimizerConfig {
  double subgradient_eta0 = 1.0;
  int subgradient_max_iters = 500;
  double subgradient_residual_tol = 1e-12;
  int subgradient_polish_passes = 4;
  double pga_eta = 0.05;
  int pga_max_iters = 200;
  double beta_min = 0.0;
  double beta_max = -1.0;  // default 10 / latency_target
  double beta_epsilon = -1.0;  // default span / 1024
  double kappa = 1.25;
};

struct PlannerConfig {
  int gpu_count = 0;
  double arrival_rate_rps = 0.0;
  double latency_target_ms = 0.0;
  Metric metric = Metric::TTFT;
  double rho_floor = 1.0;
  uint64_t seed = 0;
  int parallelism = 0;  // 0 -> hardware concurrency

  std::vector<ModelConfig> models;

  std::string profiles_path;
  std::string memory_path;
  std::string scores_path;          // exclusive with synth_prompts
  std::optional<int> synth_prompts;  // synthetic workload size

  OptimizerConfig optimizer;

  std::string base_dir;  // directory of the config file; relative paths resolve against it
};

// Parses and validates a JSON planner config. Every complaint names the
// offending field. Paths are resolved relative to the config file.
PlannerConfig load_config(const std::string& path);

}  // namespace routeplan
