#include "routeplan/latency.hpp"

#include <algorithm>
#include <cmath>

#include "routeplan/csv.hpp"

namespace routeplan {

namespace {

long quantize_rho(double rho) { return std::lround(rho * 1e4); }

// Index of the segment governing `load`: first knot strictly greater.
size_t upper_knot(const std::vector<std::pair<double, double>>& knots, double load) {
  return static_cast<size_t>(
      std::upper_bound(knots.begin(), knots.end(), load,
                       [](double l, const auto& k) { return l < k.first; }) -
      knots.begin());
}

double segment_slope(const std::vector<std::pair<double, double>>& knots, size_t hi) {
  const auto& [x1, y1] = knots[hi - 1];
  const auto& [x2, y2] = knots[hi];
  return (y2 - y1) / (x2 - x1);
}

void check_setup_and_w(const SystemSetup& setup, const RoutingFractions& w) {
  if (w.m() != setup.m())
    throw ValidationError("routing fractions have " + std::to_string(w.m()) +
                          " entries for " + std::to_string(setup.m()) + " models");
  // Loose sum tolerance: finite-difference probes sit slightly off the
  // simplex; the weighted-sum formula is well-defined there.
  w.validate(1e-4);
}

}  // namespace

void LatencyProfile::validate() const {
  if (knots.size() < 2)
    throw ValidationError("profile " + describe_profile_key(model, tp, rho, metric) +
                          ": needs at least two knots");
  for (size_t k = 0; k < knots.size(); ++k) {
    if (knots[k].first < 0.0 || knots[k].second < 0.0)
      throw ValidationError("profile " + describe_profile_key(model, tp, rho, metric) +
                            ": negative load or latency");
    if (k > 0 && !(knots[k].first > knots[k - 1].first))
      throw ValidationError("profile " + describe_profile_key(model, tp, rho, metric) +
                            ": loads must be strictly increasing");
  }
}

bool ProfileKey::operator<(const ProfileKey& o) const {
  if (model != o.model) return model < o.model;
  if (tp != o.tp) return tp < o.tp;
  if (rho_q != o.rho_q) return rho_q < o.rho_q;
  return static_cast<int>(metric) < static_cast<int>(o.metric);
}

ProfileKey make_profile_key(const std::string& model, int tp, double rho, Metric metric) {
  return ProfileKey{model, tp, quantize_rho(rho), metric};
}

std::string describe_profile_key(const std::string& model, int tp, double rho, Metric metric) {
  return "(model=" + model + ", tp=" + std::to_string(tp) + ", rho=" + format_double(rho) +
         ", metric=" + metric_name(metric) + ")";
}

bool ProfileLibrary::contains(const std::string& model, int tp, double rho,
                              Metric metric) const {
  return profiles.count(make_profile_key(model, tp, rho, metric)) > 0;
}

const LatencyProfile& ProfileLibrary::at(const std::string& model, int tp, double rho,
                                         Metric metric) const {
  auto it = profiles.find(make_profile_key(model, tp, rho, metric));
  if (it == profiles.end())
    throw ConfigError("no latency profile for " + describe_profile_key(model, tp, rho, metric));
  return it->second;
}

ProfileLibrary load_profiles(const std::string& path) {
  CsvTable csv = read_csv(path);
  int c_model = csv.column("model");
  int c_tp = csv.column("tp");
  int c_rho = csv.column("rho");
  int c_metric = csv.column("metric");
  int c_load = csv.column("load_rps");
  int c_lat = csv.column("latency_ms");
  if (c_model < 0 || c_tp < 0 || c_rho < 0 || c_metric < 0 || c_load < 0 || c_lat < 0)
    throw ConfigError(path + ": profile table needs columns model,tp,rho,metric,load_rps,latency_ms");

  ProfileLibrary lib;
  for (size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    std::string where = path + " row " + std::to_string(r + 1);
    long tp = parse_long(row[c_tp], where + " tp");
    double rho = parse_double(row[c_rho], where + " rho");
    Metric metric = parse_metric(row[c_metric]);
    double load = parse_double(row[c_load], where + " load_rps");
    double lat = parse_double(row[c_lat], where + " latency_ms");
    if (tp < 1) throw ValidationError(where + ": tp must be >= 1");
    if (!(rho > 0.0) || rho > 1.0) throw ValidationError(where + ": rho must lie in (0, 1]");
    if (load < 0.0) throw ValidationError(where + ": load_rps must be >= 0");
    if (lat < 0.0) throw ValidationError(where + ": latency_ms must be >= 0");

    ProfileKey key = make_profile_key(row[c_model], static_cast<int>(tp), rho, metric);
    auto& profile = lib.profiles[key];
    if (profile.knots.empty()) {
      profile.model = row[c_model];
      profile.tp = static_cast<int>(tp);
      profile.rho = rho;
      profile.metric = metric;
    }
    profile.knots.emplace_back(load, lat);
  }

  for (auto& [key, profile] : lib.profiles) {
    std::sort(profile.knots.begin(), profile.knots.end());
    for (size_t k = 1; k < profile.knots.size(); ++k)
      if (profile.knots[k].first == profile.knots[k - 1].first)
        throw ValidationError(path + ": duplicate load " + format_double(profile.knots[k].first) +
                              " in profile " +
                              describe_profile_key(profile.model, profile.tp, profile.rho,
                                                   profile.metric));
    if (profile.knots.size() < 2)
      throw ValidationError(path + ": profile " +
                            describe_profile_key(profile.model, profile.tp, profile.rho,
                                                 profile.metric) +
                            " has fewer than two measurements");
    // Anchor the curve at zero load so low-traffic lookups stay flat instead
    // of extrapolating backwards.
    if (profile.knots.front().first > 0.0)
      profile.knots.insert(profile.knots.begin(), {0.0, profile.knots.front().second});
    profile.validate();
  }
  return lib;
}

double latency_at(const LatencyProfile& profile, double load_rps) {
  if (load_rps < 0.0) throw ValidationError("latency_at: negative load");
  const auto& knots = profile.knots;
  size_t hi = upper_knot(knots, load_rps);
  if (hi == 0) return knots.front().second;  // below the first measurement: flat
  if (hi == knots.size()) hi = knots.size() - 1;  // beyond the last: extend final segment
  const auto& [x1, y1] = knots[hi - 1];
  return y1 + (load_rps - x1) * segment_slope(knots, hi);
}

double latency_slope(const LatencyProfile& profile, double load_rps) {
  if (load_rps < 0.0) throw ValidationError("latency_slope: negative load");
  const auto& knots = profile.knots;
  size_t hi = upper_knot(knots, load_rps);
  if (hi == 0) return 0.0;
  if (hi == knots.size()) hi = knots.size() - 1;
  return segment_slope(knots, hi);
}

double system_latency(const ProfileLibrary& lib, const SystemSetup& setup,
                      const RoutingFractions& w, double lambda_rps, Metric metric) {
  check_setup_and_w(setup, w);
  double total = 0.0;
  for (int i = 0; i < setup.m(); ++i) {
    const auto& ms = setup.per_model[i];
    const LatencyProfile& profile = lib.at(ms.model, ms.tp, ms.rho, metric);
    if (w.w[i] == 0.0) continue;  // unused model contributes nothing
    total += w.w[i] * latency_at(profile, lambda_rps * w.w[i]);
  }
  return total;
}

std::vector<double> system_latency_grad(const ProfileLibrary& lib, const SystemSetup& setup,
                                        const RoutingFractions& w, double lambda_rps,
                                        Metric metric) {
  check_setup_and_w(setup, w);
  std::vector<double> grad(setup.m());
  for (int i = 0; i < setup.m(); ++i) {
    const auto& ms = setup.per_model[i];
    const LatencyProfile& profile = lib.at(ms.model, ms.tp, ms.rho, metric);
    double load = lambda_rps * w.w[i];
    grad[i] = latency_at(profile, load) + load * latency_slope(profile, load);
  }
  return grad;
}

SystemLatencyEval system_latency_eval(const ProfileLibrary& lib, const SystemSetup& setup,
                                      const RoutingFractions& w, double lambda_rps,
                                      Metric metric, double kappa) {
  check_setup_and_w(setup, w);
  SystemLatencyEval eval;
  eval.per_model_load.resize(setup.m());
  eval.per_model_latency.resize(setup.m());
  eval.out_of_range.resize(setup.m());
  for (int i = 0; i < setup.m(); ++i) {
    const auto& ms = setup.per_model[i];
    const LatencyProfile& profile = lib.at(ms.model, ms.tp, ms.rho, metric);
    double load = lambda_rps * w.w[i];
    eval.per_model_load[i] = load;
    eval.per_model_latency[i] = latency_at(profile, load);
    eval.out_of_range[i] = load > kappa * profile.max_measured_load();
    if (w.w[i] != 0.0) eval.latency_ms += w.w[i] * eval.per_model_latency[i];
  }
  return eval;
}

}  // namespace routeplan
