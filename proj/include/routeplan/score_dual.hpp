#pragma once

#include <vector>

#include "routeplan/workload.hpp"

namespace routeplan {

// Per-model prompt budgets c_i >= 0 with sum c_i == N (fractional allowed).
struct TargetCounts {
  std::vector<double> counts;

  int m() const { return static_cast<int>(counts.size()); }
  double total() const;
  void validate(int n_prompts) const;
  // True when every c_i sits within `tol` of an integer.
  bool integral(double tol = 1e-9) const;
};

// One price per model; the score surrogate is s_i(x) - alpha_i.
struct DualPrices {
  std::vector<double> alpha;

  int m() const { return static_cast<int>(alpha.size()); }
};

struct Assignment {
  std::vector<int> model_of;  // N entries, model index per prompt
  std::vector<int> counts;    // M entries, prompts per model
};

// Price-adjusted argmax rule: prompt j goes to argmax_i (s_i(x_j) - alpha_i),
// ties to the lowest model index.
Assignment assign_prompts(const ScoreMatrix& scores, const DualPrices& prices);

// g(alpha) = (1/N) [ sum_j max_i (s_i(x_j) - alpha_i) + sum_i alpha_i c_i ].
// Upper-bounds the constrained mean score for every alpha.
double dual_objective(const ScoreMatrix& scores, const TargetCounts& targets,
                      const DualPrices& prices);

struct SubgradientParams {
  double eta0 = 1.0;        // step eta_t = eta0 / sqrt(t + 1)
  int max_iters = 500;
  double residual_tol = 1e-12;  // on max_i |n_i - c_i| / N
  int polish_passes = 4;        // coordinate-descent refinement after the loop
  std::vector<double> init_alpha;  // warm start; zeros when empty
};

struct DualSolution {
  DualPrices alpha_star;       // gauge-fixed: min_i alpha_i == 0
  double score = 0.0;          // integral targets: exact repaired mean; else dual bound
  double dual_bound = 0.0;     // best g(alpha) seen (always an upper bound)
  double duality_gap = 0.0;    // dual_bound - score (0 when score is the bound itself)
  std::vector<int> assignment;       // N entries; repaired to exact counts when integral
  std::vector<double> count_residual;  // (n_i(alpha_star) - c_i) / N before repair
  int iterations = 0;
  bool converged = false;  // residual under tol, or polish reached a fixpoint
};

// Projected-price solve of the constrained-assignment score problem:
// subgradient descent on g (best iterate kept), coordinate-descent polish,
// then, for integral targets, an exchange repair that restores the counts
// exactly and reports the achieved primal mean.
DualSolution solve_dual(const ScoreMatrix& scores, const TargetCounts& targets,
                        const SubgradientParams& params = {});

// Brute-force enumeration of every assignment meeting integral targets;
// returns the exact optimal mean score. Guards: targets integral, and
// N <= max_n (the search visits up to M^N states).
double exact_score_oracle(const ScoreMatrix& scores, const TargetCounts& targets,
                          int max_n = 12);

}  // namespace routeplan
