#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "routeplan/latency.hpp"
#include "routeplan/score_dual.hpp"
#include "routeplan/types.hpp"

namespace routeplan {

// Euclidean projection onto the probability simplex (sort-and-threshold).
// Non-finite input is a validation error.
RoutingFractions project_simplex(const std::vector<double>& v);

// Shared problem data for the inner optimizers.
struct OptimizeContext {
  const ScoreMatrix* scores = nullptr;
  const ProfileLibrary* lib = nullptr;
  double lambda_rps = 0.0;
  double tau_ms = 0.0;
  Metric metric = Metric::TTFT;
  double kappa = 1.25;  // out-of-range threshold on lambda*w_i vs. measured load
};

struct PgaParams {
  double eta = 0.05;
  int max_iters = 200;
  double w_tol = 1e-10;  // stop when the projected step moves w by less than this
  SubgradientParams dual;
  // Diagnostics hook, called with each new iterate (after projection).
  std::function<void(const RoutingFractions&)> on_iterate;
};

struct RelaxedSolveResult {
  RoutingFractions w;
  double objective = 0.0;   // score - beta * (latency - tau) at w
  double score = 0.0;       // canonical re-evaluation at w (cold-start dual solve)
  double latency_ms = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<bool> out_of_range;
};

// Projected gradient ascent on J(w) = S(w) - beta * (L(w) - tau) over the
// simplex, from the uniform point. The score gradient is the vector of
// optimal prices (warm-started between iterates); the best-objective iterate
// wins and is re-evaluated with a cold-started dual solve before returning.
RelaxedSolveResult optimize_fractions(const SystemSetup& setup, double beta,
                                      const OptimizeContext& ctx, const PgaParams& params = {});

struct BetaStep {
  double beta = 0.0;
  double score = 0.0;
  double latency_ms = 0.0;
  bool feasible = false;  // latency <= tau and every model inside measured range
};

struct BetaSearchParams {
  double beta_min = 0.0;
  double beta_max = -1.0;  // < 0 -> default 10 / tau
  double epsilon = -1.0;   // < 0 -> default (beta_max - beta_min) / 1024
  PgaParams pga;
};

struct BetaSearchResult {
  bool feasible = false;
  std::optional<double> beta_star;
  std::optional<RoutingFractions> w_star;
  RelaxedSolveResult best;       // inner result at (beta_star, w_star) when feasible
  std::vector<BetaStep> trace;   // one entry per bisection step
};

// Bisection on the latency penalty: infeasible midpoints raise beta_min,
// feasible ones lower beta_max and record the incumbent, so the smallest
// penalty that meets the target (within epsilon) wins. A plan is declared
// infeasible only after the whole bracket is exhausted.
BetaSearchResult optimize_beta(const SystemSetup& setup, const OptimizeContext& ctx,
                               const BetaSearchParams& params = {});

}  // namespace routeplan
