#include "routeplan/routing_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace routeplan {

namespace {

void check_context(const SystemSetup& setup, const OptimizeContext& ctx) {
  if (!ctx.scores || !ctx.lib) throw ValidationError("optimizer context: missing scores or profiles");
  setup.validate();
  if (setup.m() != ctx.scores->m())
    throw ValidationError("setup has " + std::to_string(setup.m()) + " models, score matrix has " +
                          std::to_string(ctx.scores->m()));
  for (int i = 0; i < setup.m(); ++i)
    if (setup.per_model[i].model != ctx.scores->models[i])
      throw ValidationError("setup model order does not match score matrix (position " +
                            std::to_string(i) + ": '" + setup.per_model[i].model + "' vs '" +
                            ctx.scores->models[i] + "')");
  if (!(ctx.lambda_rps > 0.0)) throw ValidationError("arrival rate must be positive");
  if (!(ctx.kappa > 0.0)) throw ValidationError("kappa must be positive");
  // Fail fast on missing profiles rather than mid-iteration.
  for (const auto& ms : setup.per_model) ctx.lib->at(ms.model, ms.tp, ms.rho, ctx.metric);
}

TargetCounts counts_for(const ScoreMatrix& scores, const RoutingFractions& w) {
  TargetCounts t;
  t.counts.resize(w.m());
  for (int i = 0; i < w.m(); ++i) t.counts[i] = scores.n() * w.w[i];
  return t;
}

}  // namespace

RoutingFractions project_simplex(const std::vector<double>& v) {
  if (v.empty()) throw ValidationError("project_simplex: empty input");
  for (double x : v)
    if (!std::isfinite(x)) throw ValidationError("project_simplex: non-finite input");
  const int m = static_cast<int>(v.size());

  // Sort-and-threshold: find the largest k for which the top-k entries stay
  // positive after sharing the deficit, then clip at that threshold.
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (int k = 0; k < m; ++k) {
    css += u[k];
    double t = (css - 1.0) / (k + 1);
    if (u[k] > t) {
      rho = k + 1;
      theta = t;
    }
  }
  (void)rho;

  RoutingFractions out;
  out.w.resize(m);
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    out.w[i] = std::max(v[i] - theta, 0.0);
    sum += out.w[i];
  }
  for (double& x : out.w) x /= sum;
  return out;
}

RelaxedSolveResult optimize_fractions(const SystemSetup& setup, double beta,
                                      const OptimizeContext& ctx, const PgaParams& params) {
  check_context(setup, ctx);
  if (!(beta >= 0.0)) throw ValidationError("beta must be >= 0");
  const ScoreMatrix& scores = *ctx.scores;
  const int m = scores.m();

  RoutingFractions w;
  w.w.assign(m, 1.0 / m);

  double best_obj = -std::numeric_limits<double>::infinity();
  RoutingFractions best_w = w;
  int iterations = 0;
  bool converged = false;

  SubgradientParams dual_params = params.dual;
  std::vector<double> warm_alpha;  // carried between PGA iterates

  for (int t = 0; t < params.max_iters; ++t) {
    dual_params.init_alpha = warm_alpha;
    DualSolution ds = solve_dual(scores, counts_for(scores, w), dual_params);
    warm_alpha = ds.alpha_star.alpha;

    SystemLatencyEval eval =
        system_latency_eval(*ctx.lib, setup, w, ctx.lambda_rps, ctx.metric, ctx.kappa);
    double obj = ds.dual_bound - beta * (eval.latency_ms - ctx.tau_ms);
    if (obj > best_obj) {
      best_obj = obj;
      best_w = w;
    }
    iterations = t + 1;

    std::vector<double> grad_l =
        system_latency_grad(*ctx.lib, setup, w, ctx.lambda_rps, ctx.metric);
    std::vector<double> step(m);
    for (int i = 0; i < m; ++i)
      step[i] = w.w[i] + params.eta * (ds.alpha_star.alpha[i] - beta * grad_l[i]);
    RoutingFractions next = project_simplex(step);
    if (params.on_iterate) params.on_iterate(next);

    double moved = 0.0;
    for (int i = 0; i < m; ++i) moved = std::max(moved, std::abs(next.w[i] - w.w[i]));
    w = next;
    if (moved <= params.w_tol) {
      converged = true;
      break;
    }
  }

  // Canonical (cold-started) evaluation at the winning iterate, so the
  // reported numbers are reproducible without the optimizer's history.
  SubgradientParams cold = params.dual;
  cold.init_alpha.clear();
  DualSolution final_ds = solve_dual(scores, counts_for(scores, best_w), cold);
  SystemLatencyEval final_eval =
      system_latency_eval(*ctx.lib, setup, best_w, ctx.lambda_rps, ctx.metric, ctx.kappa);

  RelaxedSolveResult out;
  out.w = best_w;
  out.score = final_ds.score;
  out.latency_ms = final_eval.latency_ms;
  out.objective = final_ds.score - beta * (final_eval.latency_ms - ctx.tau_ms);
  out.iterations = iterations;
  out.converged = converged;
  out.out_of_range = final_eval.out_of_range;
  return out;
}

BetaSearchResult optimize_beta(const SystemSetup& setup, const OptimizeContext& ctx,
                               const BetaSearchParams& params) {
  check_context(setup, ctx);
  double lo = params.beta_min;
  double hi = params.beta_max;
  if (hi < 0.0) {
    if (!(ctx.tau_ms > 0.0))
      throw ValidationError("latency target must be positive to derive default beta bounds");
    hi = 10.0 / ctx.tau_ms;
  }
  double eps = params.epsilon;
  if (eps < 0.0) eps = (hi - lo) / 1024.0;
  if (!(lo >= 0.0) || !(lo < hi)) throw ValidationError("beta bounds must satisfy 0 <= min < max");
  if (!(eps > 0.0)) throw ValidationError("beta search epsilon must be positive");

  BetaSearchResult out;
  while (hi - lo > eps) {
    double mid = 0.5 * (lo + hi);
    RelaxedSolveResult r = optimize_fractions(setup, mid, ctx, params.pga);
    bool in_range = std::none_of(r.out_of_range.begin(), r.out_of_range.end(),
                                 [](bool b) { return b; });
    bool ok = r.latency_ms <= ctx.tau_ms && in_range;
    out.trace.push_back({mid, r.score, r.latency_ms, ok});
    if (ok) {
      // Feasible: remember the incumbent and try a smaller penalty.
      out.feasible = true;
      out.beta_star = mid;
      out.w_star = r.w;
      out.best = r;
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return out;
}

}  // namespace routeplan
