#pragma once

#include <iosfwd>
#include <string>

#include "routeplan/config.hpp"
#include "routeplan/setup_search.hpp"

namespace routeplan {

// Process exit codes: 0 feasible / OK, 2 no feasible plan (or nothing
// retained for a sweep), 1 config or validation failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInfeasible = 2;

// Loads the three input tables declared by `cfg` (or synthesizes scores).
struct LoadedInputs {
  ScoreMatrix scores;
  ProfileLibrary profiles;
  MemoryTable memory;
};

LoadedInputs load_inputs(const PlannerConfig& cfg);

SetupSpace setup_space_of(const PlannerConfig& cfg);

// Full planning run; writes `plan.txt` under out_dir. Returns 0 or 2.
int run_plan(const PlannerConfig& cfg, const std::string& out_dir, std::ostream& log);

// Per-retained-setup table; writes `sweep.csv` under out_dir. Returns 0, or 2
// when nothing was retained (header-only file).
int run_sweep(const PlannerConfig& cfg, const std::string& out_dir, std::ostream& log);

// Validation-only pass (no optimization): input shapes, enumeration and
// retention counts, profile coverage of retained setups. Report goes to
// `log`; returns 0 when everything checks out, 1 otherwise.
int run_check(const PlannerConfig& cfg, std::ostream& log);

// Deterministic plan document used by run_plan (exposed for tests).
std::string render_plan(const PlannerConfig& cfg, const SearchOutput& out);

}  // namespace routeplan
