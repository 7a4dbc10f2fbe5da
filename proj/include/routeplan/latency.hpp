#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "routeplan/types.hpp"

namespace routeplan {

// Piecewise-linear latency-vs-load curve for one (model, tp, rho, metric).
struct LatencyProfile {
  std::string model;
  int tp = 1;
  double rho = 1.0;
  Metric metric = Metric::TTFT;
  std::vector<std::pair<double, double>> knots;  // (load_rps, latency_ms), load strictly increasing

  double max_measured_load() const { return knots.back().first; }
  void validate() const;
};

struct ProfileKey {
  std::string model;
  int tp = 1;
  long rho_q = 0;  // rho quantized to 1e-4 so config and CSV values match
  Metric metric = Metric::TTFT;

  bool operator<(const ProfileKey& o) const;
};

ProfileKey make_profile_key(const std::string& model, int tp, double rho, Metric metric);
std::string describe_profile_key(const std::string& model, int tp, double rho, Metric metric);

struct ProfileLibrary {
  std::map<ProfileKey, LatencyProfile> profiles;

  bool contains(const std::string& model, int tp, double rho, Metric metric) const;
  // ConfigError naming the full key when absent.
  const LatencyProfile& at(const std::string& model, int tp, double rho, Metric metric) const;
};

// Loads "model,tp,rho,metric,load_rps,latency_ms" rows, groups them by key,
// sorts each group by load, and prepends a (0, first-latency) knot when no
// zero-load measurement exists. Duplicate loads within a key, fewer than two
// knots, or negative values are validation errors.
ProfileLibrary load_profiles(const std::string& path);

// Piecewise-linear interpolation; flat below the first knot, extrapolated
// with the final segment's slope above the last knot. load < 0 is an error.
double latency_at(const LatencyProfile& profile, double load_rps);

// Right-hand slope of the curve at `load_rps` (0 below the first knot,
// final-segment slope beyond the last).
double latency_slope(const LatencyProfile& profile, double load_rps);

// Expected latency sum_i w_i * l_i(lambda * w_i); w_i == 0 contributes zero.
double system_latency(const ProfileLibrary& lib, const SystemSetup& setup,
                      const RoutingFractions& w, double lambda_rps, Metric metric);

// d/dw_i of the above: l_i(lambda w_i) + lambda w_i * slope_i(lambda w_i).
std::vector<double> system_latency_grad(const ProfileLibrary& lib, const SystemSetup& setup,
                                        const RoutingFractions& w, double lambda_rps,
                                        Metric metric);

// One-pass evaluation with the diagnostics the planner reports.
struct SystemLatencyEval {
  double latency_ms = 0.0;
  std::vector<double> per_model_load;     // lambda * w_i
  std::vector<double> per_model_latency;  // l_i(lambda * w_i)
  std::vector<bool> out_of_range;         // lambda * w_i > kappa * max measured load
};

SystemLatencyEval system_latency_eval(const ProfileLibrary& lib, const SystemSetup& setup,
                                      const RoutingFractions& w, double lambda_rps,
                                      Metric metric, double kappa);

}  // namespace routeplan
