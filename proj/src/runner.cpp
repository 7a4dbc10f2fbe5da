#include "routeplan/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "routeplan/csv.hpp"

namespace routeplan {

namespace {

namespace fs = std::filesystem;

std::string resolve(const PlannerConfig& cfg, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute() || cfg.base_dir.empty()) return path;
  return (fs::path(cfg.base_dir) / p).string();
}

std::vector<std::string> model_names(const PlannerConfig& cfg) {
  std::vector<std::string> names;
  names.reserve(cfg.models.size());
  for (const auto& m : cfg.models) names.push_back(m.name);
  return names;
}

SearchParams search_params_of(const PlannerConfig& cfg) {
  SearchParams params;
  params.parallelism = cfg.parallelism;
  params.beta.beta_min = cfg.optimizer.beta_min;
  params.beta.beta_max = cfg.optimizer.beta_max;
  params.beta.epsilon = cfg.optimizer.beta_epsilon;
  params.beta.pga.eta = cfg.optimizer.pga_eta;
  params.beta.pga.max_iters = cfg.optimizer.pga_max_iters;
  params.beta.pga.dual.eta0 = cfg.optimizer.subgradient_eta0;
  params.beta.pga.dual.max_iters = cfg.optimizer.subgradient_max_iters;
  params.beta.pga.dual.residual_tol = cfg.optimizer.subgradient_residual_tol;
  params.beta.pga.dual.polish_passes = cfg.optimizer.subgradient_polish_passes;
  return params;
}

SearchOutput run_search(const PlannerConfig& cfg, const LoadedInputs& inputs) {
  SearchContext ctx;
  ctx.gpu_count = cfg.gpu_count;
  ctx.rho_floor = cfg.rho_floor;
  ctx.mem = &inputs.memory;
  ctx.opt.scores = &inputs.scores;
  ctx.opt.lib = &inputs.profiles;
  ctx.opt.lambda_rps = cfg.arrival_rate_rps;
  ctx.opt.tau_ms = cfg.latency_target_ms;
  ctx.opt.metric = cfg.metric;
  ctx.opt.kappa = cfg.optimizer.kappa;
  return select_setup(setup_space_of(cfg), ctx, search_params_of(cfg));
}

void write_text(const std::string& dir, const std::string& name, const std::string& body) {
  fs::create_directories(dir.empty() ? "." : dir);
  fs::path path = fs::path(dir.empty() ? "." : dir) / name;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file: " + path.string());
  out << body;
  if (!out.flush()) throw ConfigError("write failed: " + path.string());
}

std::string render_sweep_csv(const PlannerConfig& cfg, const std::vector<SweepRecord>& sweep) {
  std::ostringstream out;
  out << "setup_id";
  for (size_t i = 0; i < cfg.models.size(); ++i) {
    std::string n = std::to_string(i + 1);
    out << ",model" << n << ",tp" << n << ",rho" << n;
  }
  out << ",score,latency_ms,feasible\n";
  for (const auto& rec : sweep) {
    out << rec.setup_id;
    for (const auto& ms : rec.setup.per_model)
      out << ',' << ms.model << ',' << ms.tp << ',' << format_double(ms.rho);
    out << ',' << format_double(rec.score) << ',' << format_double(rec.latency_ms) << ','
        << (rec.feasible ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace

LoadedInputs load_inputs(const PlannerConfig& cfg) {
  LoadedInputs inputs;
  inputs.profiles = load_profiles(resolve(cfg, cfg.profiles_path));
  inputs.memory = load_memory_table(resolve(cfg, cfg.memory_path));
  if (cfg.synth_prompts) {
    std::vector<BetaShape> shapes;
    for (const auto& m : cfg.models) {
      if (!m.score_beta)
        throw ConfigError("config field 'models." + m.name +
                          ".score_beta': required when scores are synthetic");
      shapes.push_back(*m.score_beta);
    }
    inputs.scores = synth_scores(*cfg.synth_prompts, model_names(cfg), shapes, cfg.seed);
  } else {
    inputs.scores = load_scores(resolve(cfg, cfg.scores_path), model_names(cfg));
  }
  return inputs;
}

SetupSpace setup_space_of(const PlannerConfig& cfg) {
  SetupSpace space;
  space.models = model_names(cfg);
  for (const auto& m : cfg.models) {
    space.tp_choices.push_back(m.tp_choices);
    space.rho_choices.push_back(m.rho_choices);
  }
  return space;
}

std::string render_plan(const PlannerConfig& cfg, const SearchOutput& out) {
  const PlanResult& plan = out.plan;
  std::ostringstream doc;
  doc << "status = " << (plan.feasible ? "FEASIBLE" : "INFEASIBLE") << '\n';
  doc << "gpu_count = " << cfg.gpu_count << '\n';
  doc << "arrival_rate_rps = " << format_double(cfg.arrival_rate_rps) << '\n';
  doc << "latency_target_ms = " << format_double(cfg.latency_target_ms) << '\n';
  doc << "metric = " << metric_name(cfg.metric) << '\n';
  doc << "enumerated_setups = " << plan.enumerated_count << '\n';
  doc << "retained_setups = " << plan.retained_count << '\n';
  doc << "evaluated_setups = " << plan.evaluated_count << '\n';
  std::string names;
  for (const auto& m : cfg.models) {
    if (!names.empty()) names += ",";
    names += m.name;
  }
  doc << "models = " << names << '\n';
  if (plan.feasible) {
    doc << "score = " << format_double(plan.score) << '\n';
    doc << "latency_ms = " << format_double(plan.latency_ms) << '\n';
    doc << "beta = " << format_double(plan.beta) << '\n';
    for (int i = 0; i < plan.setup.m(); ++i) {
      const auto& ms = plan.setup.per_model[i];
      doc << "setup." << ms.model << ".tp = " << ms.tp << '\n';
      doc << "setup." << ms.model << ".rho = " << format_double(ms.rho) << '\n';
      doc << "w." << ms.model << " = " << format_double(plan.w.w[i]) << '\n';
      doc << "load_rps." << ms.model << " = " << format_double(plan.per_model_load[i]) << '\n';
      doc << "out_of_range." << ms.model << " = " << (plan.out_of_range[i] ? 1 : 0) << '\n';
    }
  }
  return doc.str();
}

int run_plan(const PlannerConfig& cfg, const std::string& out_dir, std::ostream& log) {
  LoadedInputs inputs = load_inputs(cfg);
  SearchOutput out = run_search(cfg, inputs);
  write_text(out_dir, "plan.txt", render_plan(cfg, out));
  if (!out.plan.feasible) {
    log << "no feasible plan (" << out.plan.retained_count << " setups retained, "
        << out.plan.evaluated_count << " evaluated)\n";
    return kExitInfeasible;
  }
  log << "plan: score " << format_double(out.plan.score) << ", latency "
      << format_double(out.plan.latency_ms) << " ms (target "
      << format_double(cfg.latency_target_ms) << " ms), " << out.plan.retained_count
      << " setups retained\n";
  return kExitOk;
}

int run_sweep(const PlannerConfig& cfg, const std::string& out_dir, std::ostream& log) {
  LoadedInputs inputs = load_inputs(cfg);
  SearchOutput out = run_search(cfg, inputs);
  write_text(out_dir, "sweep.csv", render_sweep_csv(cfg, out.sweep));
  log << "sweep: " << out.sweep.size() << " retained setups written\n";
  return out.sweep.empty() ? kExitInfeasible : kExitOk;
}

int run_check(const PlannerConfig& cfg, std::ostream& log) {
  bool ok = true;
  log << "models = ";
  for (size_t i = 0; i < cfg.models.size(); ++i) log << (i ? "," : "") << cfg.models[i].name;
  log << '\n';

  // Inputs load independently so one bad file does not mask the others.
  ProfileLibrary profiles;
  MemoryTable memory;
  bool have_profiles = false, have_memory = false;
  try {
    profiles = load_profiles(resolve(cfg, cfg.profiles_path));
    have_profiles = true;
    log << "profiles: OK (" << profiles.profiles.size() << " curves)\n";
  } catch (const std::exception& e) {
    ok = false;
    log << "profiles: ERROR " << e.what() << '\n';
  }
  try {
    memory = load_memory_table(resolve(cfg, cfg.memory_path));
    have_memory = true;
    log << "memory: OK (" << memory.entries.size() << " entries)\n";
  } catch (const std::exception& e) {
    ok = false;
    log << "memory: ERROR " << e.what() << '\n';
  }
  try {
    LoadedInputs tmp;
    if (cfg.synth_prompts) {
      std::vector<BetaShape> shapes;
      for (const auto& m : cfg.models) {
        if (!m.score_beta)
          throw ConfigError("config field 'models." + m.name +
                            ".score_beta': required when scores are synthetic");
        shapes.push_back(*m.score_beta);
      }
      tmp.scores = synth_scores(*cfg.synth_prompts, model_names(cfg), shapes, cfg.seed);
    } else {
      tmp.scores = load_scores(resolve(cfg, cfg.scores_path), model_names(cfg));
    }
    double lo = 1.0, hi = 0.0, sum = 0.0;
    for (double v : tmp.scores.scores) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    log << "scores: N=" << tmp.scores.n() << " M=" << tmp.scores.m() << " min="
        << format_double(lo) << " max=" << format_double(hi) << " mean="
        << format_double(sum / tmp.scores.scores.size()) << '\n';
  } catch (const std::exception& e) {
    ok = false;
    log << "scores: ERROR " << e.what() << '\n';
  }

  SetupSpace space = setup_space_of(cfg);
  std::vector<SystemSetup> all = enumerate_setups(space);
  log << "enumerated_setups = " << all.size() << '\n';

  if (have_memory) {
    std::vector<const SystemSetup*> retained;
    try {
      for (const auto& setup : all)
        if (retain(setup, cfg.gpu_count, cfg.rho_floor, memory) == RetainVerdict::RETAINED)
          retained.push_back(&setup);
      log << "retained_setups = " << retained.size() << '\n';
    } catch (const std::exception& e) {
      ok = false;
      log << "retention: ERROR " << e.what() << '\n';
    }
    if (have_profiles) {
      std::set<std::string> missing;
      for (const SystemSetup* setup : retained)
        for (const auto& ms : setup->per_model)
          if (!profiles.contains(ms.model, ms.tp, ms.rho, cfg.metric))
            missing.insert(describe_profile_key(ms.model, ms.tp, ms.rho, cfg.metric));
      if (missing.empty()) {
        log << "profile_coverage: OK\n";
      } else {
        ok = false;
        log << "profile_coverage: MISSING " << missing.size() << " keys\n";
        for (const auto& key : missing) log << "  missing profile " << key << '\n';
      }
    }
  } else {
    log << "retained_setups: skipped (memory table unavailable)\n";
  }

  log << "check: " << (ok ? "OK" : "FAIL") << '\n';
  return ok ? kExitOk : kExitValidation;
}

}  // namespace routeplan
