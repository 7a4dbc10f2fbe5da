#include "routeplan/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "routeplan/csv.hpp"

namespace routeplan {

Metric parse_metric(const std::string& name) {
  if (name == "TTFT") return Metric::TTFT;
  if (name == "TPOT") return Metric::TPOT;
  if (name == "E2E") return Metric::E2E;
  throw ValidationError("unknown metric '" + name + "' (expected TTFT, TPOT, or E2E)");
}

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::TTFT: return "TTFT";
    case Metric::TPOT: return "TPOT";
    case Metric::E2E: return "E2E";
  }
  return "?";
}

void SystemSetup::validate() const {
  if (per_model.empty()) throw ValidationError("setup: no models");
  std::set<std::string> seen;
  for (const auto& ms : per_model) {
    if (ms.model.empty()) throw ValidationError("setup: empty model name");
    if (!seen.insert(ms.model).second)
      throw ValidationError("setup: duplicate model '" + ms.model + "'");
    if (ms.tp < 1) throw ValidationError("setup: model '" + ms.model + "' tp must be >= 1");
    if (!(ms.rho > 0.0) || ms.rho > 1.0)
      throw ValidationError("setup: model '" + ms.model + "' rho must lie in (0, 1]");
  }
}

void MemoryTable::insert(const std::string& model, int tp, double mem_fraction) {
  Key key{model, tp};
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const auto& e, const Key& k) { return e.first < k; });
  if (it != entries.end() && !(key < it->first))
    throw ValidationError("memory table: duplicate entry for (" + model + ", tp=" +
                          std::to_string(tp) + ")");
  entries.insert(it, {key, mem_fraction});
}

bool MemoryTable::contains(const std::string& model, int tp) const {
  Key key{model, tp};
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const auto& e, const Key& k) { return e.first < k; });
  return it != entries.end() && !(key < it->first);
}

double MemoryTable::at(const std::string& model, int tp) const {
  Key key{model, tp};
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const auto& e, const Key& k) { return e.first < k; });
  if (it == entries.end() || key < it->first)
    throw ConfigError("memory table: no entry for (" + model + ", tp=" + std::to_string(tp) +
                      ")");
  return it->second;
}

MemoryTable load_memory_table(const std::string& path) {
  CsvTable csv = read_csv(path);
  int c_model = csv.column("model");
  int c_tp = csv.column("tp");
  int c_mem = csv.column("mem_fraction");
  if (c_model < 0 || c_tp < 0 || c_mem < 0)
    throw ConfigError(path + ": memory table needs columns model,tp,mem_fraction");
  MemoryTable table;
  for (size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    std::string where = path + " row " + std::to_string(r + 1);
    long tp = parse_long(row[c_tp], where + " tp");
    double mem = parse_double(row[c_mem], where + " mem_fraction");
    if (tp < 1) throw ValidationError(where + ": tp must be >= 1");
    if (!(mem > 0.0) || mem > 1.0)
      throw ValidationError(where + ": mem_fraction must lie in (0, 1]");
    table.insert(row[c_model], static_cast<int>(tp), mem);
  }
  return table;
}

void RoutingFractions::validate(double tol) const {
  if (w.empty()) throw ValidationError("routing fractions: empty");
  double sum = 0.0;
  for (double x : w) {
    if (!std::isfinite(x)) throw ValidationError("routing fractions: non-finite entry");
    if (x < -tol) throw ValidationError("routing fractions: negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol)
    throw ValidationError("routing fractions: entries sum to " + std::to_string(sum) +
                          ", expected 1");
}

}  // namespace routeplan
