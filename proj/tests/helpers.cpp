#include "helpers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace testutil {

namespace fs = std::filesystem;

ScoreMatrix make_scores(const std::vector<std::vector<double>>& rows) {
  ScoreMatrix matrix;
  size_t m = rows.at(0).size();
  for (size_t i = 0; i < m; ++i) matrix.models.push_back(std::string(1, static_cast<char>('A' + i)));
  for (size_t j = 0; j < rows.size(); ++j) {
    matrix.prompts.push_back("p" + std::to_string(j + 1));
    if (rows[j].size() != m) throw std::invalid_argument("ragged score rows");
    for (double v : rows[j]) matrix.scores.push_back(v);
  }
  matrix.validate();
  return matrix;
}

ScoreMatrix random_scores(int n, int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<double>> rows(n, std::vector<double>(m));
  for (auto& row : rows)
    for (double& v : row) v = unif(rng);
  return make_scores(rows);
}

std::vector<double> random_simplex(int m, double conc, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(conc, 1.0);
  std::vector<double> w(m);
  double sum = 0.0;
  for (double& x : w) {
    x = gamma(rng);
    sum += x;
  }
  for (double& x : w) x /= sum;
  return w;
}

TargetCounts make_counts(std::vector<double> counts) {
  TargetCounts t;
  t.counts = std::move(counts);
  return t;
}

TargetCounts random_integer_counts(int n, int m, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, m - 1);
  std::vector<double> counts(m, 0.0);
  for (int j = 0; j < n; ++j) counts[pick(rng)] += 1.0;
  return make_counts(std::move(counts));
}

LatencyProfile make_profile(const std::string& model, int tp, double rho, Metric metric,
                            std::vector<std::pair<double, double>> knots) {
  LatencyProfile p;
  p.model = model;
  p.tp = tp;
  p.rho = rho;
  p.metric = metric;
  p.knots = std::move(knots);
  p.validate();
  return p;
}

void add_profile(ProfileLibrary& lib, const LatencyProfile& profile) {
  lib.profiles[make_profile_key(profile.model, profile.tp, profile.rho, profile.metric)] =
      profile;
}

double m2_sort_oracle(const ScoreMatrix& scores, double c0) {
  if (scores.m() != 2) throw std::invalid_argument("m2_sort_oracle needs M=2");
  const int n = scores.n();
  std::vector<double> diff(n);
  double base = 0.0;
  for (int j = 0; j < n; ++j) {
    diff[j] = scores.at(j, 0) - scores.at(j, 1);
    base += scores.at(j, 1);
  }
  std::sort(diff.begin(), diff.end(), std::greater<double>());
  int k = static_cast<int>(std::floor(c0 + 1e-12));
  k = std::clamp(k, 0, n);
  double value = base;
  for (int j = 0; j < k; ++j) value += diff[j];
  if (k < n) value += (c0 - k) * diff[k];
  return value / n;
}

GridProjection grid_project(const std::vector<double>& v, int steps) {
  GridProjection best;
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<double> w) {
    double d = 0.0;
    for (size_t i = 0; i < v.size(); ++i) d += (w[i] - v[i]) * (w[i] - v[i]);
    if (d < best.value) {
      best.value = d;
      best.w = std::move(w);
    }
  };
  if (v.size() == 2) {
    for (int a = 0; a <= steps; ++a) {
      double t = static_cast<double>(a) / steps;
      consider({t, 1.0 - t});
    }
  } else if (v.size() == 3) {
    for (int a = 0; a <= steps; ++a)
      for (int b = 0; b <= steps - a; ++b) {
        double x = static_cast<double>(a) / steps;
        double y = static_cast<double>(b) / steps;
        consider({x, y, 1.0 - x - y});
      }
  } else {
    throw std::invalid_argument("grid_project supports M in {2,3}");
  }
  return best;
}

namespace {

bool pack_rec(const std::vector<std::pair<std::string, double>>& shards, size_t idx,
              std::vector<double>& remaining, std::vector<std::set<std::string>>& occupants) {
  if (idx == shards.size()) return true;
  const auto& [model, frac] = shards[idx];
  for (size_t g = 0; g < remaining.size(); ++g) {
    if (remaining[g] < frac - 1e-9 || occupants[g].count(model)) continue;
    remaining[g] -= frac;
    occupants[g].insert(model);
    if (pack_rec(shards, idx + 1, remaining, occupants)) return true;
    remaining[g] += frac;
    occupants[g].erase(model);
  }
  return false;
}

}  // namespace

bool packing_feasible_exhaustive(const std::vector<std::pair<std::string, double>>& shards,
                                 int gpu_count) {
  std::vector<double> remaining(gpu_count, 1.0);
  std::vector<std::set<std::string>> occupants(gpu_count);
  return pack_rec(shards, 0, remaining, occupants);
}

TieInfo tie_structure(const ScoreMatrix& scores, const std::vector<double>& alpha,
                      double tie_eps, double clear_eps) {
  TieInfo info;
  const int n = scores.n(), m = scores.m();
  for (int j = 0; j < n; ++j) {
    const double* row = scores.row(j);
    int arg = 0;
    double top = row[0] - alpha[0];
    for (int i = 1; i < m; ++i) {
      double v = row[i] - alpha[i];
      if (v > top) {
        top = v;
        arg = i;
      }
    }
    for (int i = 0; i < m; ++i) {
      if (i == arg) continue;
      double gap = top - (row[i] - alpha[i]);
      if (gap < tie_eps) {
        info.ties.insert({j, i, arg});
      } else if (gap < clear_eps) {
        return info;  // ambiguous margin; clean stays false
      }
    }
  }
  info.clean = true;
  return info;
}

bool tie_graph_connected(const std::set<std::tuple<int, int, int>>& ties, int m) {
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [j, i, k] : ties) parent[find(i)] = find(k);
  std::set<int> roots;
  for (int i = 0; i < m; ++i) roots.insert(find(i));
  return roots.size() == 1;
}

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "routeplan_test_XXXXXX").string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
  path = buf.data();
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path, ec);
}

std::string TempDir::file(const std::string& name) const {
  return (fs::path(path) / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

}  // namespace testutil
