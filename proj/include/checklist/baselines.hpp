#pragma once

// L1-regularized logistic regression and the unit-weighting conversion of
// its coefficients into checklists.

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "checklist/core.hpp"
#include "checklist/dataset.hpp"
#include "checklist/error.hpp"
#include "checklist/pool.hpp"

namespace checklist {

struct LinearModel {
  std::vector<double> beta;
  double intercept = 0.0;
  double l1_penalty = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_trace;  // penalized objective per accepted step

  bool all_zero() const {
    return std::all_of(beta.begin(), beta.end(), [](double b) { return b == 0.0; });
  }
};

struct LogRegConfig {
  double tol = 1e-6;
  int max_iter = 5000;
};

// Mean logistic loss (1/n) sum log(1 + exp(-y_i (x_i beta + b))).
inline double logistic_loss(const BinaryDataset& data, const std::vector<double>& beta, double b) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    double z = b;
    for (std::size_t j = 0; j < data.d; ++j)
      if (data.at(i, j)) z += beta[j];
    const double m = data.y[i] * z;
    s += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
  }
  return s / static_cast<double>(data.n);
}

// Gradient of logistic_loss; the last entry is the intercept derivative.
inline std::vector<double> logistic_gradient(const BinaryDataset& data, const std::vector<double>& beta, double b) {
  std::vector<double> g(data.d + 1, 0.0);
  for (std::size_t i = 0; i < data.n; ++i) {
    double z = b;
    for (std::size_t j = 0; j < data.d; ++j)
      if (data.at(i, j)) z += beta[j];
    const double m = data.y[i] * z;
    // d/dz log(1 + e^{-yz}) = -y sigma(-yz)
    const double sig = m > 0 ? std::exp(-m) / (1.0 + std::exp(-m)) : 1.0 / (1.0 + std::exp(m));
    const double c = -data.y[i] * sig;
    for (std::size_t j = 0; j < data.d; ++j)
      if (data.at(i, j)) g[j] += c;
    g[data.d] += c;
  }
  for (auto& v : g) v /= static_cast<double>(data.n);
  return g;
}

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Proximal gradient with backtracking on mean logistic loss + penalty ||beta||_1.
inline LinearModel fit_l1_logreg(const BinaryDataset& data, double penalty, const LogRegConfig& cfg = {}) {
  require(penalty > 0, ErrorCode::InvalidArgument, "penalty must be positive");
  require(data.n > 0, ErrorCode::InvalidArgument, "empty dataset");
  const std::size_t d = data.d;
  LinearModel m;
  m.l1_penalty = penalty;
  m.beta.assign(d, 0.0);
  double b = 0.0;
  double t = 1.0;
  auto l1 = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  };
  double f = logistic_loss(data, m.beta, b);
  m.objective_trace.push_back(f + penalty * l1(m.beta));
  std::vector<double> nb(d);
  for (int it = 0; it < cfg.max_iter; ++it) {
    const auto g = logistic_gradient(data, m.beta, b);
    double fz = 0.0, b_new = 0.0, step2 = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t j = 0; j < d; ++j) nb[j] = soft_threshold(m.beta[j] - t * g[j], t * penalty);
      b_new = b - t * g[d];
      fz = logistic_loss(data, nb, b_new);
      double lin = 0.0;
      step2 = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double dx = nb[j] - m.beta[j];
        lin += g[j] * dx;
        step2 += dx * dx;
      }
      const double db = b_new - b;
      lin += g[d] * db;
      step2 += db * db;
      if (fz <= f + lin + step2 / (2 * t) + 1e-15) break;
      t *= 0.5;
    }
    m.iterations = it + 1;
    const double step_norm = std::sqrt(step2) / t;
    m.beta = nb;
    b = b_new;
    f = fz;
    m.objective_trace.push_back(f + penalty * l1(m.beta));
    if (step_norm < cfg.tol) {
      m.converged = true;
      break;
    }
    t *= 1.25;
  }
  m.intercept = b;
  return m;
}

// 8 log-spaced points over [1e-5, 10].
inline std::vector<double> default_penalty_grid(int points = 8, double lo = 1e-5, double hi = 10.0) {
  std::vector<double> g;
  for (int k = 0; k < points; ++k) {
    const double a = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
    g.push_back(std::pow(10.0, std::log10(lo) + a * (std::log10(hi) - std::log10(lo))));
  }
  return g;
}

struct UnitConfig {
  std::vector<double> penalties;  // empty: default grid
  std::optional<int> n_max;       // checklists with more items are dropped
  LogRegConfig logreg;
  double w_minus = 1.0;
  bool parallel = true;
};

struct UnitResult {
  BinaryDataset data;  // input plus any complement items the checklists use
  ChecklistPool pool;  // evaluated on `data`
  std::vector<LinearModel> models;
  std::vector<std::string> notes;
};

// Item index in `aug` equal to the negation of item j of `data`.
inline int negation_index(const BinaryDataset& aug, int j) {
  const auto& it = aug.items[static_cast<std::size_t>(j)];
  if (it.is_complement()) return it.complement_of;
  for (std::size_t k = 0; k < aug.d; ++k)
    if (aug.items[k].is_complement() && aug.items[k].complement_of == j) return static_cast<int>(k);
  return -1;
}

// Items with positive coefficients plus the complements of items with
// negative ones. `aug` must already contain those complements.
inline std::vector<int> unit_items(const LinearModel& m, const BinaryDataset& aug) {
  std::vector<int> ids;
  for (std::size_t j = 0; j < m.beta.size(); ++j) {
    if (m.beta[j] > 0) ids.push_back(static_cast<int>(j));
    if (m.beta[j] < 0) {
      const int k = negation_index(aug, static_cast<int>(j));
      require(k >= 0, ErrorCode::UnknownItem, "no complement for item '" + aug.items[j].name + "'");
      ids.push_back(k);
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

inline UnitResult unit_weighting(const BinaryDataset& data, const UnitConfig& cfg = {}) {
  const auto penalties = cfg.penalties.empty() ? default_penalty_grid() : cfg.penalties;
  require(!penalties.empty(), ErrorCode::InvalidArgument, "empty penalty grid");
  UnitResult out{data, ChecklistPool(cfg.w_minus), {}, {}};

  if (cfg.parallel && penalties.size() > 1) {
    std::vector<std::future<LinearModel>> futs;
    for (double p : penalties)
      futs.push_back(std::async(std::launch::async, [&, p] { return fit_l1_logreg(data, p, cfg.logreg); }));
    for (auto& f : futs) out.models.push_back(f.get());
  } else {
    for (double p : penalties) out.models.push_back(fit_l1_logreg(data, p, cfg.logreg));
  }

  std::set<int> negated;
  for (const auto& m : out.models)
    for (std::size_t j = 0; j < data.d; ++j)
      if (m.beta[j] < 0 && !data.items[j].is_complement()) negated.insert(static_cast<int>(j));
  out.data = add_complements(data, negated);
  const auto group = out.data.item_group();

  for (const auto& m : out.models) {
    const std::string tag = "unit l1=" + format_number(m.l1_penalty);
    if (m.all_zero()) {
      out.notes.push_back(tag + ": empty model, skipped");
      continue;
    }
    const auto ids = unit_items(m, out.data);
    if (!m.converged) out.notes.push_back(tag + ": not converged");
    if (cfg.n_max && static_cast<int>(ids.size()) > *cfg.n_max) {
      out.notes.push_back(tag + ": " + std::to_string(ids.size()) + " items exceed N_max, skipped");
      continue;
    }
    std::map<int, int> per_group;
    for (int j : ids) ++per_group[group[static_cast<std::size_t>(j)]];
    int violations = 0;
    for (const auto& [g, c] : per_group) violations += c > 1;
    for (int M = 1; M <= static_cast<int>(ids.size()); ++M) {
      auto c = make_checklist(out.data, ids, M, "unit");
      c.provenance.notes["l1_penalty"] = format_number(m.l1_penalty);
      const auto k = out.pool.add(c, out.data, "heuristic", tag);
      out.pool.entries()[k].meta["group_violations"] = std::to_string(violations);
    }
  }
  out.pool.sort_by_objective();
  return out;
}

}  // namespace checklist
