#include "routeplan/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "routeplan/errors.hpp"

namespace routeplan {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

const json& require(const json& obj, const std::string& field) {
  auto it = obj.find(field);
  if (it == obj.end()) fail(field, "missing");
  return *it;
}

double get_number(const json& obj, const std::string& field) {
  const json& v = require(obj, field);
  if (!v.is_number()) fail(field, "must be a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const std::string& field, double def) {
  if (!obj.contains(field)) return def;
  return get_number(obj, field);
}

long get_integer(const json& obj, const std::string& field) {
  const json& v = require(obj, field);
  if (!v.is_number_integer()) fail(field, "must be an integer");
  return v.get<long>();
}

long get_integer_or(const json& obj, const std::string& field, long def) {
  if (!obj.contains(field)) return def;
  return get_integer(obj, field);
}

std::string get_string(const json& obj, const std::string& field) {
  const json& v = require(obj, field);
  if (!v.is_string()) fail(field, "must be a string");
  return v.get<std::string>();
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) fail(where.empty() ? key : where + "." + key, "unknown field");
}

OptimizerConfig parse_optimizer(const json& obj) {
  OptimizerConfig opt;
  reject_unknown(obj, "optimizer", {"subgradient", "pga", "beta", "kappa"});
  if (obj.contains("subgradient")) {
    const json& s = obj.at("subgradient");
    if (!s.is_object()) fail("optimizer.subgradient", "must be an object");
    reject_unknown(s, "optimizer.subgradient", {"eta0", "max_iters", "residual_tol", "polish_passes"});
    opt.subgradient_eta0 = get_number_or(s, "eta0", opt.subgradient_eta0);
    opt.subgradient_max_iters = static_cast<int>(get_integer_or(s, "max_iters", opt.subgradient_max_iters));
    opt.subgradient_residual_tol = get_number_or(s, "residual_tol", opt.subgradient_residual_tol);
    opt.subgradient_polish_passes = static_cast<int>(get_integer_or(s, "polish_passes", opt.subgradient_polish_passes));
    if (!(opt.subgradient_eta0 > 0.0)) fail("optimizer.subgradient.eta0", "must be > 0");
    if (opt.subgradient_max_iters < 1) fail("optimizer.subgradient.max_iters", "must be >= 1");
    if (opt.subgradient_polish_passes < 0) fail("optimizer.subgradient.polish_passes", "must be >= 0");
  }
  if (obj.contains("pga")) {
    const json& p = obj.at("pga");
    if (!p.is_object()) fail("optimizer.pga", "must be an object");
    reject_unknown(p, "optimizer.pga", {"eta", "max_iters"});
    opt.pga_eta = get_number_or(p, "eta", opt.pga_eta);
    opt.pga_max_iters = static_cast<int>(get_integer_or(p, "max_iters", opt.pga_max_iters));
    if (!(opt.pga_eta > 0.0)) fail("optimizer.pga.eta", "must be > 0");
    if (opt.pga_max_iters < 1) fail("optimizer.pga.max_iters", "must be >= 1");
  }
  if (obj.contains("beta")) {
    const json& b = obj.at("beta");
    if (!b.is_object()) fail("optimizer.beta", "must be an object");
    reject_unknown(b, "optimizer.beta", {"min", "max", "epsilon"});
    opt.beta_min = get_number_or(b, "min", opt.beta_min);
    if (b.contains("max")) opt.beta_max = get_number(b, "max");
    if (b.contains("epsilon")) opt.beta_epsilon = get_number(b, "epsilon");
    if (opt.beta_min < 0.0) fail("optimizer.beta.min", "must be >= 0");
    if (b.contains("max") && !(opt.beta_max > opt.beta_min))
      fail("optimizer.beta.max", "must exceed optimizer.beta.min");
    if (b.contains("epsilon") && !(opt.beta_epsilon > 0.0))
      fail("optimizer.beta.epsilon", "must be > 0");
  }
  opt.kappa = get_number_or(obj, "kappa", opt.kappa);
  if (!(opt.kappa > 0.0)) fail("optimizer.kappa", "must be > 0");
  return opt;
}

std::vector<ModelConfig> parse_models(const json& arr, bool need_shapes) {
  if (!arr.is_array() || arr.empty()) fail("models", "must be a non-empty array");
  std::vector<ModelConfig> models;
  std::set<std::string> names;
  for (size_t i = 0; i < arr.size(); ++i) {
    const json& m = arr[i];
    std::string where = "models[" + std::to_string(i) + "]";
    if (!m.is_object()) fail(where, "must be an object");
    reject_unknown(m, where, {"name", "tp_choices", "rho_choices", "score_beta"});
    ModelConfig mc;
    mc.name = get_string(m, "name");
    if (mc.name.empty()) fail(where + ".name", "must be non-empty");
    if (!names.insert(mc.name).second) fail(where + ".name", "duplicate model '" + mc.name + "'");

    const json& tps = require(m, "tp_choices");
    if (!tps.is_array() || tps.empty()) fail(where + ".tp_choices", "must be a non-empty array");
    for (const auto& v : tps) {
      if (!v.is_number_integer()) fail(where + ".tp_choices", "entries must be integers");
      long tp = v.get<long>();
      if (tp < 1) fail(where + ".tp_choices", "entries must be >= 1");
      mc.tp_choices.push_back(static_cast<int>(tp));
    }
    const json& rhos = require(m, "rho_choices");
    if (!rhos.is_array() || rhos.empty()) fail(where + ".rho_choices", "must be a non-empty array");
    for (const auto& v : rhos) {
      if (!v.is_number()) fail(where + ".rho_choices", "entries must be numbers");
      double rho = v.get<double>();
      if (!(rho > 0.0) || rho > 1.0) fail(where + ".rho_choices", "entries must lie in (0, 1]");
      mc.rho_choices.push_back(rho);
    }
    // Choice order carries no meaning; canonicalize so enumeration order is
    // a function of the sets, not of how the file lists them.
    std::sort(mc.tp_choices.begin(), mc.tp_choices.end());
    mc.tp_choices.erase(std::unique(mc.tp_choices.begin(), mc.tp_choices.end()), mc.tp_choices.end());
    std::sort(mc.rho_choices.begin(), mc.rho_choices.end());
    mc.rho_choices.erase(std::unique(mc.rho_choices.begin(), mc.rho_choices.end()), mc.rho_choices.end());

    if (m.contains("score_beta")) {
      const json& sb = m.at("score_beta");
      if (!sb.is_array() || sb.size() != 2 || !sb[0].is_number() || !sb[1].is_number())
        fail(where + ".score_beta", "must be [a, b] with two numbers");
      BetaShape shape{sb[0].get<double>(), sb[1].get<double>()};
      if (!(shape.a > 0.0) || !(shape.b > 0.0)) fail(where + ".score_beta", "shapes must be > 0");
      mc.score_beta = shape;
    } else if (need_shapes) {
      fail(where + ".score_beta", "required when scores are synthetic");
    }
    models.push_back(std::move(mc));
  }
  return models;
}

}  // namespace

PlannerConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file " + path + ": top level must be an object");

  reject_unknown(doc, "", {"gpu_count", "arrival_rate_rps", "latency_target_ms", "metric",
                           "rho_min", "seed", "parallelism", "models", "profiles", "memory",
                           "scores", "synthetic", "optimizer"});

  PlannerConfig cfg;
  cfg.base_dir = std::filesystem::path(path).parent_path().string();

  cfg.gpu_count = static_cast<int>(get_integer(doc, "gpu_count"));
  if (cfg.gpu_count < 1) fail("gpu_count", "must be >= 1");
  cfg.arrival_rate_rps = get_number(doc, "arrival_rate_rps");
  if (!(cfg.arrival_rate_rps > 0.0)) fail("arrival_rate_rps", "must be > 0");
  cfg.latency_target_ms = get_number(doc, "latency_target_ms");
  if (!(cfg.latency_target_ms > 0.0)) fail("latency_target_ms", "must be > 0");
  try {
    cfg.metric = parse_metric(get_string(doc, "metric"));
  } catch (const ValidationError& e) {
    fail("metric", e.what());
  }
  cfg.rho_floor = get_number_or(doc, "rho_min", 1.0);
  if (!(cfg.rho_floor > 0.0) || cfg.rho_floor > 1.0) fail("rho_min", "must lie in (0, 1]");
  long seed = get_integer_or(doc, "seed", 0);
  if (seed < 0) fail("seed", "must be >= 0");
  cfg.seed = static_cast<uint64_t>(seed);
  long par = get_integer_or(doc, "parallelism", 0);
  if (par < 0) fail("parallelism", "must be >= 0 (0 = all processors)");
  cfg.parallelism = static_cast<int>(par);

  cfg.profiles_path = get_string(doc, "profiles");
  cfg.memory_path = get_string(doc, "memory");

  bool has_scores = doc.contains("scores");
  bool has_synth = doc.contains("synthetic");
  if (has_scores == has_synth)
    fail(has_scores ? "scores" : "synthetic", "exactly one of 'scores' and 'synthetic' is required");
  if (has_scores) cfg.scores_path = get_string(doc, "scores");
  if (has_synth) {
    const json& s = doc.at("synthetic");
    if (!s.is_object()) fail("synthetic", "must be an object");
    reject_unknown(s, "synthetic", {"n_prompts"});
    long n = get_integer(s, "n_prompts");
    if (n < 1) fail("synthetic.n_prompts", "must be >= 1");
    cfg.synth_prompts = static_cast<int>(n);
  }

  cfg.models = parse_models(require(doc, "models"), has_synth);

  if (doc.contains("optimizer")) {
    if (!doc.at("optimizer").is_object()) fail("optimizer", "must be an object");
    cfg.optimizer = parse_optimizer(doc.at("optimizer"));
  }
  return cfg;
}

}  // namespace routeplan
