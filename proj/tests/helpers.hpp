#pragma once

#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "routeplan/config.hpp"
#include "routeplan/latency.hpp"
#include "routeplan/routing_opt.hpp"
#include "routeplan/runner.hpp"
#include "routeplan/score_dual.hpp"
#include "routeplan/setup_search.hpp"
#include "routeplan/types.hpp"
#include "routeplan/workload.hpp"

namespace testutil {

using namespace routeplan;

// --- instance builders -------------------------------------------------

// Matrix from literal rows; prompts p1.., models A, B, C...
ScoreMatrix make_scores(const std::vector<std::vector<double>>& rows);

ScoreMatrix random_scores(int n, int m, std::mt19937_64& rng);

// Dirichlet(conc,...,conc) sample.
std::vector<double> random_simplex(int m, double conc, std::mt19937_64& rng);

TargetCounts make_counts(std::vector<double> counts);

// Random nonnegative integer counts summing to n.
TargetCounts random_integer_counts(int n, int m, std::mt19937_64& rng);

LatencyProfile make_profile(const std::string& model, int tp, double rho, Metric metric,
                            std::vector<std::pair<double, double>> knots);

void add_profile(ProfileLibrary& lib, const LatencyProfile& profile);

// --- independent oracles ------------------------------------------------

// Exact constrained-assignment value for M=2 by sorting score differences;
// c0 is model-0's (possibly fractional) prompt budget.
double m2_sort_oracle(const ScoreMatrix& scores, double c0);

// Dense-grid minimizer of ||w - v||^2 over the simplex (M = 2 or 3).
struct GridProjection {
  double value = 0.0;
  std::vector<double> w;
};
GridProjection grid_project(const std::vector<double>& v, int steps);

// Exhaustive anti-affinity packing feasibility (ground truth for FFD checks).
bool packing_feasible_exhaustive(const std::vector<std::pair<std::string, double>>& shards,
                                 int gpu_count);

// --- tie-structure utilities for gradient tests --------------------------

// The set of (prompt, runner-up model, argmax model) ties at prices `alpha`;
// clean=false when any gap falls between tie_eps and clear_eps (ambiguous).
struct TieInfo {
  bool clean = false;
  std::set<std::tuple<int, int, int>> ties;
};
TieInfo tie_structure(const ScoreMatrix& scores, const std::vector<double>& alpha,
                      double tie_eps = 1e-9, double clear_eps = 1e-6);

// True when tie edges join all models into one component (differentiability
// proxy: the dual optimum pins every price difference).
bool tie_graph_connected(const std::set<std::tuple<int, int, int>>& ties, int m);

// --- filesystem fixtures --------------------------------------------------

struct TempDir {
  std::string path;
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string file(const std::string& name) const;
};

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace testutil
