#include "routeplan/setup_search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

namespace routeplan {

namespace {

// Slack for budget/capacity comparisons so exact-boundary sums (e.g. four
// 0.25 shards on one GPU) are not rejected over the last float bit.
constexpr double kEps = 1e-9;

}  // namespace

void SetupSpace::validate() const {
  if (models.empty()) throw ValidationError("setup space: no models");
  std::set<std::string> seen;
  for (const auto& m : models)
    if (!seen.insert(m).second) throw ValidationError("setup space: duplicate model '" + m + "'");
  if (tp_choices.size() != models.size() || rho_choices.size() != models.size())
    throw ValidationError("setup space: need tp and rho choices for every model");
  for (size_t i = 0; i < models.size(); ++i) {
    if (tp_choices[i].empty() || rho_choices[i].empty())
      throw ValidationError("setup space: model '" + models[i] + "' has an empty choice set");
    for (size_t k = 0; k < tp_choices[i].size(); ++k) {
      if (tp_choices[i][k] < 1)
        throw ValidationError("setup space: model '" + models[i] + "' tp choice must be >= 1");
      if (k > 0 && tp_choices[i][k] <= tp_choices[i][k - 1])
        throw ValidationError("setup space: model '" + models[i] +
                              "' tp choices must be strictly increasing");
    }
    for (size_t k = 0; k < rho_choices[i].size(); ++k) {
      double r = rho_choices[i][k];
      if (!(r > 0.0) || r > 1.0)
        throw ValidationError("setup space: model '" + models[i] + "' rho choice must lie in (0, 1]");
      if (k > 0 && rho_choices[i][k] <= rho_choices[i][k - 1])
        throw ValidationError("setup space: model '" + models[i] +
                              "' rho choices must be strictly increasing");
    }
  }
}

double compute_demand(const SystemSetup& setup) {
  setup.validate();
  double c = 0.0;
  for (const auto& ms : setup.per_model) c += ms.tp * ms.rho;
  return c;
}

std::vector<std::pair<std::string, double>> shard_memory_list(const SystemSetup& setup,
                                                              const MemoryTable& mem) {
  setup.validate();
  std::vector<std::pair<std::string, double>> shards;
  for (const auto& ms : setup.per_model) {
    double frac = mem.at(ms.model, ms.tp);
    for (int s = 0; s < ms.tp; ++s) shards.emplace_back(ms.model, frac);
  }
  return shards;
}

bool ffd_feasible(const std::vector<std::pair<std::string, double>>& shards, int gpu_count) {
  if (gpu_count <= 0) throw ValidationError("ffd_feasible: GPU count must be positive");
  for (const auto& [model, frac] : shards)
    if (!(frac > 0.0) || frac > 1.0)
      throw ValidationError("ffd_feasible: shard of '" + model + "' has memory fraction " +
                            std::to_string(frac) + ", outside (0, 1]");

  // Decreasing size, ties by model name, then original order (stable sort).
  std::vector<size_t> order(shards.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (shards[a].second != shards[b].second) return shards[a].second > shards[b].second;
    return shards[a].first < shards[b].first;
  });

  std::vector<double> remaining(gpu_count, 1.0);
  std::vector<std::set<std::string>> occupants(gpu_count);
  for (size_t idx : order) {
    const auto& [model, frac] = shards[idx];
    bool placed = false;
    for (int g = 0; g < gpu_count; ++g) {
      if (remaining[g] >= frac - kEps && !occupants[g].count(model)) {
        remaining[g] -= frac;
        occupants[g].insert(model);
        placed = true;
        break;
      }
    }
    if (!placed) return false;
  }
  return true;
}

std::vector<SystemSetup> enumerate_setups(const SetupSpace& space) {
  space.validate();
  const size_t m = space.models.size();
  // Per-model flattened (tp, rho) choices, tp-major; the odometer below then
  // yields the whole product in lexicographic order, model 0 most significant.
  std::vector<std::vector<ModelSetup>> choices(m);
  for (size_t i = 0; i < m; ++i)
    for (int tp : space.tp_choices[i])
      for (double rho : space.rho_choices[i])
        choices[i].push_back({space.models[i], tp, rho});

  size_t total = 1;
  for (const auto& c : choices) total *= c.size();

  std::vector<SystemSetup> out;
  out.reserve(total);
  std::vector<size_t> idx(m, 0);
  while (true) {
    SystemSetup setup;
    setup.per_model.reserve(m);
    for (size_t i = 0; i < m; ++i) setup.per_model.push_back(choices[i][idx[i]]);
    out.push_back(std::move(setup));
    size_t pos = m;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < choices[pos].size()) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

const char* retain_verdict_name(RetainVerdict v) {
  switch (v) {
    case RetainVerdict::RETAINED: return "RETAINED";
    case RetainVerdict::UNDER_UTILIZED: return "UNDER_UTILIZED";
    case RetainVerdict::OVER_BUDGET: return "OVER_BUDGET";
    case RetainVerdict::PLACEMENT_INFEASIBLE: return "PLACEMENT_INFEASIBLE";
  }
  return "?";
}

RetainVerdict retain(const SystemSetup& setup, int gpu_count, double rho_floor,
                     const MemoryTable& mem) {
  if (gpu_count < 1) throw ValidationError("retain: GPU count must be >= 1");
  if (!(rho_floor > 0.0) || rho_floor > 1.0)
    throw ValidationError("retain: rho_min must lie in (0, 1]");
  double demand = compute_demand(setup);
  if (demand < gpu_count * rho_floor - kEps) return RetainVerdict::UNDER_UTILIZED;
  if (demand > gpu_count + kEps) return RetainVerdict::OVER_BUDGET;
  if (!ffd_feasible(shard_memory_list(setup, mem), gpu_count))
    return RetainVerdict::PLACEMENT_INFEASIBLE;
  return RetainVerdict::RETAINED;
}

SearchOutput select_setup(const SetupSpace& space, const SearchContext& ctx,
                          const SearchParams& params) {
  space.validate();
  if (!ctx.mem) throw ValidationError("select_setup: missing memory table");
  if (!ctx.opt.scores || !ctx.opt.lib)
    throw ValidationError("select_setup: missing scores or profiles");
  if (ctx.opt.scores->models != space.models)
    throw ValidationError("select_setup: score matrix columns must match the model list");

  std::vector<SystemSetup> all = enumerate_setups(space);
  std::vector<long> retained_ids;
  for (size_t id = 0; id < all.size(); ++id)
    if (retain(all[id], ctx.gpu_count, ctx.rho_floor, *ctx.mem) == RetainVerdict::RETAINED)
      retained_ids.push_back(static_cast<long>(id));

  // Resolved beta upper bound, needed for the infeasible-record fallback.
  double beta_hi = params.beta.beta_max;
  if (beta_hi < 0.0) {
    if (!(ctx.opt.tau_ms > 0.0))
      throw ValidationError("latency target must be positive to derive default beta bounds");
    beta_hi = 10.0 / ctx.opt.tau_ms;
  }

  struct Eval {
    bool feasible = false;
    double score = 0.0;
    double latency_ms = 0.0;
    double beta = 0.0;
    RoutingFractions w;
    std::vector<bool> out_of_range;
  };
  std::vector<Eval> evals(retained_ids.size());

  auto evaluate = [&](size_t k) {
    const SystemSetup& setup = all[retained_ids[k]];
    BetaSearchResult bs = optimize_beta(setup, ctx.opt, params.beta);
    Eval e;
    if (bs.feasible) {
      e.feasible = true;
      e.score = bs.best.score;
      e.latency_ms = bs.best.latency_ms;
      e.beta = *bs.beta_star;
      e.w = bs.best.w;
      e.out_of_range = bs.best.out_of_range;
    } else if (!bs.trace.empty()) {
      // Best attempt for reporting: the step that came closest to the target.
      size_t best = 0;
      for (size_t s = 1; s < bs.trace.size(); ++s)
        if (bs.trace[s].latency_ms < bs.trace[best].latency_ms) best = s;
      e.score = bs.trace[best].score;
      e.latency_ms = bs.trace[best].latency_ms;
    } else {  // degenerate bracket (span <= epsilon): evaluate the top penalty once
      RelaxedSolveResult r = optimize_fractions(setup, beta_hi, ctx.opt, params.beta.pga);
      e.score = r.score;
      e.latency_ms = r.latency_ms;
    }
    evals[k] = e;
  };

  int threads = params.parallelism > 0 ? params.parallelism
                                       : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp<int>(threads, 1, std::max<int>(1, static_cast<int>(retained_ids.size())));
  if (threads <= 1 || retained_ids.size() <= 1) {
    for (size_t k = 0; k < retained_ids.size(); ++k) evaluate(k);
  } else {
    std::atomic<size_t> cursor{0};
    std::vector<std::exception_ptr> failures(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        try {
          for (size_t k = cursor.fetch_add(1); k < evals.size(); k = cursor.fetch_add(1))
            evaluate(k);
        } catch (...) {
          failures[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);
  }

  SearchOutput out;
  out.sweep.reserve(retained_ids.size());
  for (size_t k = 0; k < retained_ids.size(); ++k)
    out.sweep.push_back({retained_ids[k], all[retained_ids[k]], evals[k].score,
                         evals[k].latency_ms, evals[k].feasible});

  // Reduction in enumeration order; enumeration order is lexicographic on the
  // setup encoding, so "keep the first on full ties" is the declared tie-break.
  long best_k = -1;
  for (size_t k = 0; k < evals.size(); ++k) {
    if (!evals[k].feasible) continue;
    if (best_k < 0 || evals[k].score > evals[best_k].score ||
        (evals[k].score == evals[best_k].score &&
         evals[k].latency_ms < evals[best_k].latency_ms))
      best_k = static_cast<long>(k);
  }

  PlanResult& plan = out.plan;
  plan.enumerated_count = static_cast<long>(all.size());
  plan.retained_count = static_cast<long>(retained_ids.size());
  plan.evaluated_count = static_cast<long>(retained_ids.size());
  if (best_k >= 0) {
    const Eval& e = evals[best_k];
    plan.feasible = true;
    plan.setup = all[retained_ids[best_k]];
    plan.w = e.w;
    plan.beta = e.beta;
    plan.score = e.score;
    plan.latency_ms = e.latency_ms;
    plan.out_of_range = e.out_of_range;
    plan.per_model_load.resize(e.w.m());
    for (int i = 0; i < e.w.m(); ++i) plan.per_model_load[i] = ctx.opt.lambda_rps * e.w.w[i];
  }
  return out;
}

}  // namespace routeplan
