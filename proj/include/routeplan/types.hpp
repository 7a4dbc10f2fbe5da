#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "routeplan/errors.hpp"

namespace routeplan {

enum class Metric { TTFT, TPOT, E2E };

Metric parse_metric(const std::string& name);
const char* metric_name(Metric m);

// One model's deployment choice: tensor-parallel degree and GPU memory share.
struct ModelSetup {
  std::string model;
  int tp = 1;
  double rho = 1.0;
};

// A joint choice across all served models, in fixed model order.
struct SystemSetup {
  std::vector<ModelSetup> per_model;

  int m() const { return static_cast<int>(per_model.size()); }
  void validate() const;
};

// Per-(model, tp) memory need of a single shard, as a fraction of one GPU.
struct MemoryTable {
  struct Key {
    std::string model;
    int tp = 1;
    bool operator<(const Key& o) const {
      if (model != o.model) return model < o.model;
      return tp < o.tp;
    }
  };
  std::vector<std::pair<Key, double>> entries;  // kept sorted by Key

  void insert(const std::string& model, int tp, double mem_fraction);
  bool contains(const std::string& model, int tp) const;
  // ConfigError naming (model, tp) when absent.
  double at(const std::string& model, int tp) const;
};

MemoryTable load_memory_table(const std::string& path);

// Point on the routing simplex: w_i >= 0, sum w_i == 1.
struct RoutingFractions {
  std::vector<double> w;

  int m() const { return static_cast<int>(w.size()); }
  void validate(double tol = 1e-9) const;
};

}  // namespace routeplan
