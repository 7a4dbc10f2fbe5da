#pragma once

#include <string>
#include <vector>

#include "routeplan/routing_opt.hpp"
#include "routeplan/types.hpp"

namespace routeplan {

// Candidate grid: per-model tensor-parallel degrees and memory fractions.
struct SetupSpace {
  std::vector<std::string> models;
  std::vector<std::vector<int>> tp_choices;      // per model, sorted ascending unique
  std::vector<std::vector<double>> rho_choices;  // per model, sorted ascending unique

  void validate() const;
};

// Aggregate GPU demand C = sum_i tp_i * rho_i (in GPUs).
double compute_demand(const SystemSetup& setup);

// The tp_i shards of each model, each needing mem(model, tp_i) of one GPU;
// order: models as given, shards of one model consecutive.
std::vector<std::pair<std::string, double>> shard_memory_list(const SystemSetup& setup,
                                                              const MemoryTable& mem);

// First-fit-decreasing with anti-affinity: shards of the same model must land
// on distinct GPUs. True when every shard fits within `gpu_count` unit bins.
bool ffd_feasible(const std::vector<std::pair<std::string, double>>& shards, int gpu_count);

// Full cartesian product in lexicographic order (model 0 most significant,
// tp-major then rho within a model).
std::vector<SystemSetup> enumerate_setups(const SetupSpace& space);

enum class RetainVerdict { RETAINED, UNDER_UTILIZED, OVER_BUDGET, PLACEMENT_INFEASIBLE };

const char* retain_verdict_name(RetainVerdict v);

// Demand-window and placement filter: keep setups with
// rho_floor * G <= C <= G that FFD can actually place.
RetainVerdict retain(const SystemSetup& setup, int gpu_count, double rho_floor,
                     const MemoryTable& mem);

struct SweepRecord {
  long setup_id = 0;  // ordinal in the full enumeration
  SystemSetup setup;
  double score = 0.0;
  double latency_ms = 0.0;
  bool feasible = false;
};

struct PlanResult {
  bool feasible = false;
  SystemSetup setup;
  RoutingFractions w;
  double beta = 0.0;
  double score = 0.0;
  double latency_ms = 0.0;
  long enumerated_count = 0;
  long retained_count = 0;
  long evaluated_count = 0;
  std::vector<double> per_model_load;
  std::vector<bool> out_of_range;
};

struct SearchContext {
  int gpu_count = 1;
  double rho_floor = 1.0;
  const MemoryTable* mem = nullptr;
  OptimizeContext opt;
};

struct SearchParams {
  BetaSearchParams beta;
  int parallelism = 0;  // <= 0 -> hardware concurrency
};

struct SearchOutput {
  PlanResult plan;
  std::vector<SweepRecord> sweep;  // one per retained setup, enumeration order
};

// Exhaustive outer search: enumerate, retain, solve the relaxed routing
// problem per retained setup (optionally across threads; the reduction is
// order-deterministic), and keep the feasible setup with the best score
// (ties: lower latency, then lexicographically smaller setup encoding).
SearchOutput select_setup(const SetupSpace& space, const SearchContext& ctx,
                          const SearchParams& params = {});

}  // namespace routeplan
