#include "routeplan/score_dual.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace routeplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dims(const ScoreMatrix& scores, const TargetCounts& targets) {
  if (scores.prompts.empty() || scores.models.empty())
    throw ValidationError("score matrix is empty");
  if (targets.m() != scores.m())
    throw ValidationError("target counts have " + std::to_string(targets.m()) +
                          " entries for " + std::to_string(scores.m()) + " models");
  targets.validate(scores.n());
}

// Assignment, per-model counts, and g(alpha) in one sweep.
double eval_dual(const ScoreMatrix& scores, const std::vector<double>& c,
                 const std::vector<double>& alpha, std::vector<int>* counts,
                 std::vector<int>* model_of) {
  const int n = scores.n(), m = scores.m();
  if (counts) counts->assign(m, 0);
  if (model_of) model_of->assign(n, 0);
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double* row = scores.row(j);
    double best = row[0] - alpha[0];
    int arg = 0;
    for (int i = 1; i < m; ++i) {
      double v = row[i] - alpha[i];
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    sum += best;
    if (counts) ++(*counts)[arg];
    if (model_of) (*model_of)[j] = arg;
  }
  for (int i = 0; i < m; ++i) sum += alpha[i] * c[i];
  return sum / n;
}

// Exact 1-D minimization of g in coordinate i: with
// b_j = s_ji - max_{k != i}(s_jk - alpha_k), the minimizer is the
// ceil(c_i)-th largest b (the largest b when c_i == 0).
void polish_pass(const ScoreMatrix& scores, const std::vector<double>& c,
                 std::vector<double>& alpha, double* max_delta) {
  const int n = scores.n(), m = scores.m();
  *max_delta = 0.0;
  std::vector<double> b(n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const double* row = scores.row(j);
      double rest = -kInf;
      for (int k = 0; k < m; ++k) {
        if (k == i) continue;
        rest = std::max(rest, row[k] - alpha[k]);
      }
      b[j] = row[i] - rest;
    }
    int k = c[i] > 1e-12 ? static_cast<int>(std::ceil(c[i] - 1e-9)) : 1;
    k = std::clamp(k, 1, n);
    std::nth_element(b.begin(), b.begin() + (k - 1), b.end(), std::greater<double>());
    double next = b[k - 1];
    *max_delta = std::max(*max_delta, std::abs(next - alpha[i]));
    alpha[i] = next;
  }
}

// Restores exact integer counts by cheapest single moves, then removes every
// profitable 2- or 3-cycle of exchanges (exact for up to three models; a
// measurable improvement beyond plain greedy on chain-shaped ties).
double repair_counts(const ScoreMatrix& scores, const std::vector<int>& target,
                     std::vector<int>& model_of, std::vector<int>& counts) {
  const int n = scores.n(), m = scores.m();
  std::vector<int> delta(m);
  for (int i = 0; i < m; ++i) delta[i] = counts[i] - target[i];

  auto move_prompt = [&](int j, int v) {
    int u = model_of[j];
    model_of[j] = v;
    --counts[u];
    ++counts[v];
    --delta[u];
    ++delta[v];
  };

  // Phase 1: drain surpluses with minimum-loss single moves.
  while (true) {
    bool over = false;
    for (int i = 0; i < m; ++i) over = over || delta[i] > 0;
    if (!over) break;
    double best_loss = kInf;
    int best_j = -1, best_v = -1;
    for (int j = 0; j < n; ++j) {
      int u = model_of[j];
      if (delta[u] <= 0) continue;
      const double* row = scores.row(j);
      for (int v = 0; v < m; ++v) {
        if (delta[v] >= 0) continue;
        double loss = row[u] - row[v];
        if (loss < best_loss) {
          best_loss = loss;
          best_j = j;
          best_v = v;
        }
      }
    }
    move_prompt(best_j, best_v);
  }

  // Phase 2: cyclic exchanges among balanced models until none is profitable.
  if (m >= 2) {
    std::vector<double> gain(static_cast<size_t>(m) * m);
    std::vector<int> witness(static_cast<size_t>(m) * m);
    for (int pass = 0; pass < 10000; ++pass) {
      for (int u = 0; u < m; ++u)
        for (int v = 0; v < m; ++v) {
          gain[u * m + v] = -kInf;
          witness[u * m + v] = -1;
        }
      for (int j = 0; j < n; ++j) {
        int u = model_of[j];
        const double* row = scores.row(j);
        for (int v = 0; v < m; ++v) {
          if (v == u) continue;
          double g = row[v] - row[u];
          if (g > gain[u * m + v]) {
            gain[u * m + v] = g;
            witness[u * m + v] = j;
          }
        }
      }
      double best = 1e-15;
      int cu = -1, cv = -1, cw = -1;
      for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v) {
          double g = gain[u * m + v] + gain[v * m + u];
          if (g > best) {
            best = g;
            cu = u;
            cv = v;
            cw = -1;
          }
        }
      for (int u = 0; u < m; ++u)
        for (int v = 0; v < m; ++v) {
          if (v == u) continue;
          for (int w = 0; w < m; ++w) {
            if (w == u || w == v) continue;
            double g = gain[u * m + v] + gain[v * m + w] + gain[w * m + u];
            if (g > best) {
              best = g;
              cu = u;
              cv = v;
              cw = w;
            }
          }
        }
      if (cu < 0) break;
      if (cw < 0) {
        int j1 = witness[cu * m + cv], j2 = witness[cv * m + cu];
        move_prompt(j1, cv);
        move_prompt(j2, cu);
      } else {
        int j1 = witness[cu * m + cv], j2 = witness[cv * m + cw], j3 = witness[cw * m + cu];
        move_prompt(j1, cv);
        move_prompt(j2, cw);
        move_prompt(j3, cu);
      }
    }
  }

  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += scores.at(j, model_of[j]);
  return sum / n;
}

}  // namespace

double TargetCounts::total() const {
  double s = 0.0;
  for (double c : counts) s += c;
  return s;
}

void TargetCounts::validate(int n_prompts) const {
  if (counts.empty()) throw ValidationError("target counts: empty");
  for (size_t i = 0; i < counts.size(); ++i) {
    if (!std::isfinite(counts[i]) || counts[i] < -1e-9)
      throw ValidationError("target counts: entry " + std::to_string(i) + " is negative");
  }
  double t = total();
  if (std::abs(t - n_prompts) > 1e-6 * std::max(1.0, static_cast<double>(n_prompts)))
    throw ValidationError("target counts sum to " + std::to_string(t) + ", expected " +
                          std::to_string(n_prompts));
}

bool TargetCounts::integral(double tol) const {
  for (double c : counts)
    if (std::abs(c - std::round(c)) > tol) return false;
  return true;
}

Assignment assign_prompts(const ScoreMatrix& scores, const DualPrices& prices) {
  if (prices.m() != scores.m())
    throw ValidationError("prices have " + std::to_string(prices.m()) + " entries for " +
                          std::to_string(scores.m()) + " models");
  Assignment out;
  std::vector<double> dummy_targets(scores.m(), 0.0);
  eval_dual(scores, dummy_targets, prices.alpha, &out.counts, &out.model_of);
  return out;
}

double dual_objective(const ScoreMatrix& scores, const TargetCounts& targets,
                      const DualPrices& prices) {
  check_dims(scores, targets);
  if (prices.m() != scores.m())
    throw ValidationError("prices have " + std::to_string(prices.m()) + " entries for " +
                          std::to_string(scores.m()) + " models");
  return eval_dual(scores, targets.counts, prices.alpha, nullptr, nullptr);
}

DualSolution solve_dual(const ScoreMatrix& scores, const TargetCounts& targets,
                        const SubgradientParams& params) {
  check_dims(scores, targets);
  const int n = scores.n(), m = scores.m();
  const std::vector<double>& c = targets.counts;

  DualSolution out;
  if (m == 1) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += scores.at(j, 0);
    out.alpha_star.alpha = {0.0};
    out.score = out.dual_bound = sum / n;
    out.assignment.assign(n, 0);
    out.count_residual = {(n - c[0]) / n};
    out.iterations = 0;
    out.converged = true;
    return out;
  }

  std::vector<double> alpha;
  if (params.init_alpha.empty()) {
    alpha.assign(m, 0.0);
  } else {
    if (static_cast<int>(params.init_alpha.size()) != m)
      throw ValidationError("init_alpha has wrong length");
    alpha = params.init_alpha;
  }

  std::vector<double> best_alpha = alpha;
  double best_g = kInf;
  auto consider = [&](const std::vector<double>& a, double g) {
    if (g < best_g) {
      best_g = g;
      best_alpha = a;
    }
  };

  // Zero prices give g(0) = mean of row maxima; always a candidate so the
  // bound never exceeds the unconstrained score.
  {
    std::vector<double> zero(m, 0.0);
    consider(zero, eval_dual(scores, c, zero, nullptr, nullptr));
  }

  std::vector<int> counts;
  out.converged = false;
  out.iterations = 0;
  for (int t = 0; t < params.max_iters; ++t) {
    double g = eval_dual(scores, c, alpha, &counts, nullptr);
    consider(alpha, g);
    out.iterations = t + 1;
    double resid = 0.0;
    for (int i = 0; i < m; ++i) resid = std::max(resid, std::abs(counts[i] - c[i]));
    resid /= n;
    if (resid <= params.residual_tol) {
      out.converged = true;
      break;
    }
    double eta = params.eta0 / std::sqrt(static_cast<double>(t) + 1.0);
    for (int i = 0; i < m; ++i) alpha[i] += eta * (counts[i] - c[i]) / n;
  }

  // Coordinate-descent refinement from the incumbent; each pass minimizes g
  // exactly in every coordinate. A vanishing pass is a certificate of a
  // (coordinate-wise) optimum, so it also counts as convergence.
  std::vector<double> polished = best_alpha;
  for (int pass = 0; pass < params.polish_passes; ++pass) {
    double max_delta = 0.0;
    polish_pass(scores, c, polished, &max_delta);
    consider(polished, eval_dual(scores, c, polished, nullptr, nullptr));
    if (max_delta <= 1e-15) {
      out.converged = true;
      break;
    }
  }

  // Gauge: uniform shifts leave the problem invariant, so pin min alpha at 0.
  double lo = *std::min_element(best_alpha.begin(), best_alpha.end());
  for (double& a : best_alpha) a -= lo;

  out.alpha_star.alpha = best_alpha;
  out.dual_bound = eval_dual(scores, c, best_alpha, &counts, &out.assignment);
  out.count_residual.resize(m);
  for (int i = 0; i < m; ++i) out.count_residual[i] = (counts[i] - c[i]) / n;

  if (targets.integral()) {
    std::vector<int> target_int(m);
    for (int i = 0; i < m; ++i) target_int[i] = static_cast<int>(std::llround(c[i]));
    out.score = repair_counts(scores, target_int, out.assignment, counts);
    out.duality_gap = out.dual_bound - out.score;
  } else {
    out.score = out.dual_bound;
    out.duality_gap = 0.0;
  }
  return out;
}

double exact_score_oracle(const ScoreMatrix& scores, const TargetCounts& targets,
                          int max_n) {
  check_dims(scores, targets);
  if (!targets.integral())
    throw ValidationError("exact oracle requires integer target counts");
  const int n = scores.n(), m = scores.m();
  if (n > max_n)
    throw ValidationError("exact oracle limited to " + std::to_string(max_n) +
                          " prompts, got " + std::to_string(n));

  // Forward DP over prompts; state = remaining per-model budget.
  std::vector<int> start(m);
  for (int i = 0; i < m; ++i) start[i] = static_cast<int>(std::llround(targets.counts[i]));
  std::map<std::vector<int>, double> cur;
  cur[start] = 0.0;
  for (int j = 0; j < n; ++j) {
    std::map<std::vector<int>, double> next;
    const double* row = scores.row(j);
    for (const auto& [state, val] : cur) {
      for (int i = 0; i < m; ++i) {
        if (state[i] == 0) continue;
        std::vector<int> s2 = state;
        --s2[i];
        double v2 = val + row[i];
        auto [it, inserted] = next.try_emplace(std::move(s2), v2);
        if (!inserted && v2 > it->second) it->second = v2;
      }
    }
    cur = std::move(next);
  }
  std::vector<int> zero(m, 0);
  auto it = cur.find(zero);
  if (it == cur.end()) throw ValidationError("exact oracle: no assignment meets the targets");
  return it->second / n;
}

}  // namespace routeplan
