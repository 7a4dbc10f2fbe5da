#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "routeplan/errors.hpp"

namespace routeplan {

// Dense prompt-by-model quality scores, row-major, every entry in [0, 1].
struct ScoreMatrix {
  std::vector<std::string> prompts;  // N prompt ids, unique
  std::vector<std::string> models;   // M model names, unique
  std::vector<double> scores;        // N * M, scores[j * M + i]

  int n() const { return static_cast<int>(prompts.size()); }
  int m() const { return static_cast<int>(models.size()); }
  double at(int j, int i) const { return scores[static_cast<size_t>(j) * models.size() + i]; }
  const double* row(int j) const { return scores.data() + static_cast<size_t>(j) * models.size(); }

  void validate() const;
};

// Loads a score table whose header holds a prompt-id column ("prompt_id")
// plus one column per model; model columns are selected and ordered by
// `model_order`. Missing column -> ConfigError; bad value -> ValidationError
// citing the offending row.
ScoreMatrix load_scores(const std::string& path, const std::vector<std::string>& model_order);

void write_scores(const ScoreMatrix& matrix, const std::string& path);

// Beta-distribution shape for one model's synthetic score column.
struct BetaShape {
  double a = 1.0;
  double b = 1.0;
};

// Synthetic workload: column i drawn i.i.d. from Beta(a_i, b_i), seeded and
// reproducible (same seed -> identical matrix on this platform).
ScoreMatrix synth_scores(int n_prompts, const std::vector<std::string>& models,
                         const std::vector<BetaShape>& shapes, uint64_t seed);

}  // namespace routeplan
