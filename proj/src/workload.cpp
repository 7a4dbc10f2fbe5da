#include "routeplan/workload.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "routeplan/csv.hpp"

namespace routeplan {

void ScoreMatrix::validate() const {
  if (prompts.empty()) throw ValidationError("score matrix: no prompts");
  if (models.empty()) throw ValidationError("score matrix: no models");
  if (scores.size() != prompts.size() * models.size())
    throw ValidationError("score matrix: storage size does not match N*M");
  std::set<std::string> seen;
  for (const auto& p : prompts)
    if (!seen.insert(p).second) throw ValidationError("score matrix: duplicate prompt id '" + p + "'");
  seen.clear();
  for (const auto& m : models)
    if (!seen.insert(m).second) throw ValidationError("score matrix: duplicate model '" + m + "'");
  for (size_t k = 0; k < scores.size(); ++k) {
    double v = scores[k];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw ValidationError("score matrix: entry for prompt '" + prompts[k / models.size()] +
                            "', model '" + models[k % models.size()] + "' is " +
                            format_double(v) + ", outside [0, 1]");
  }
}

ScoreMatrix load_scores(const std::string& path, const std::vector<std::string>& model_order) {
  CsvTable csv = read_csv(path);
  int c_prompt = csv.column("prompt_id");
  if (c_prompt < 0) throw ConfigError(path + ": missing column 'prompt_id'");
  std::vector<int> cols;
  for (const auto& name : model_order) {
    int c = csv.column(name);
    if (c < 0) throw ConfigError(path + ": missing score column for model '" + name + "'");
    cols.push_back(c);
  }
  if (csv.rows.empty()) throw ValidationError(path + ": no score rows");

  ScoreMatrix matrix;
  matrix.models = model_order;
  matrix.scores.reserve(csv.rows.size() * model_order.size());
  for (size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    std::string where = path + " row " + std::to_string(r + 1);
    matrix.prompts.push_back(row[c_prompt]);
    for (size_t i = 0; i < cols.size(); ++i) {
      double v = parse_double(row[cols[i]], where + " model '" + model_order[i] + "'");
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw ValidationError(where + " (prompt '" + row[c_prompt] + "'): score " +
                              row[cols[i]] + " for model '" + model_order[i] +
                              "' is outside [0, 1]");
      matrix.scores.push_back(v);
    }
  }
  matrix.validate();
  return matrix;
}

void write_scores(const ScoreMatrix& matrix, const std::string& path) {
  matrix.validate();
  CsvTable csv;
  csv.header.push_back("prompt_id");
  for (const auto& m : matrix.models) csv.header.push_back(m);
  for (int j = 0; j < matrix.n(); ++j) {
    std::vector<std::string> row;
    row.push_back(matrix.prompts[j]);
    for (int i = 0; i < matrix.m(); ++i) row.push_back(format_double(matrix.at(j, i)));
    csv.rows.push_back(std::move(row));
  }
  write_csv(csv, path);
}

ScoreMatrix synth_scores(int n_prompts, const std::vector<std::string>& models,
                         const std::vector<BetaShape>& shapes, uint64_t seed) {
  if (n_prompts < 1) throw ValidationError("synthetic workload: n_prompts must be >= 1");
  if (models.empty()) throw ValidationError("synthetic workload: no models");
  if (shapes.size() != models.size())
    throw ValidationError("synthetic workload: need one (a, b) shape per model");
  for (size_t i = 0; i < shapes.size(); ++i)
    if (!(shapes[i].a > 0.0) || !(shapes[i].b > 0.0))
      throw ValidationError("synthetic workload: model '" + models[i] +
                            "' needs shape parameters a > 0 and b > 0");

  ScoreMatrix matrix;
  matrix.models = models;
  matrix.prompts.reserve(n_prompts);
  for (int j = 0; j < n_prompts; ++j) matrix.prompts.push_back("p" + std::to_string(j + 1));
  matrix.scores.assign(static_cast<size_t>(n_prompts) * models.size(), 0.0);

  // Beta(a, b) via the ratio of two gamma draws, one engine per matrix so the
  // result is a pure function of (n, models, shapes, seed).
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < models.size(); ++i) {
    std::gamma_distribution<double> ga(shapes[i].a, 1.0);
    std::gamma_distribution<double> gb(shapes[i].b, 1.0);
    for (int j = 0; j < n_prompts; ++j) {
      double x = ga(rng), y = gb(rng);
      while (x + y <= 0.0) {  // both underflowed; effectively never at sane shapes
        x = ga(rng);
        y = gb(rng);
      }
      matrix.scores[static_cast<size_t>(j) * models.size() + i] = x / (x + y);
    }
  }
  matrix.validate();
  return matrix;
}

}  // namespace routeplan
