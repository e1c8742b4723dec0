#pragma once

// Checklist model, predictions, confusion counts, the lexicographic
// objective and optimality-gap arithmetic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "checklist/dataset.hpp"
#include "checklist/error.hpp"

namespace checklist {

struct Provenance {
  std::string method = "mip";  // mip | cover | unit
  std::map<std::string, std::string> notes;
};

// An M-of-N rule: predict +1 when at least M of the N listed items are checked.
struct Checklist {
  std::vector<int> item_ids;  // ascending, distinct
  int M = 1;
  std::vector<std::string> item_names;
  std::vector<ItemDef> item_defs;  // may be empty when built from bare indices
  Provenance provenance;

  int N() const { return static_cast<int>(item_ids.size()); }

  void validate(std::size_t d) const {
    require(!item_ids.empty(), ErrorCode::InvalidArgument, "checklist needs at least one item");
    require(M >= 1 && M <= N(), ErrorCode::InvalidArgument,
            "threshold M=" + std::to_string(M) + " outside [1, N=" + std::to_string(N()) + "]");
    for (std::size_t k = 0; k < item_ids.size(); ++k) {
      require(item_ids[k] >= 0 && static_cast<std::size_t>(item_ids[k]) < d, ErrorCode::IndexOutOfRange,
              "item index " + std::to_string(item_ids[k]) + " out of range");
      require(k == 0 || item_ids[k] > item_ids[k - 1], ErrorCode::InvalidArgument,
              "item ids must be distinct and ascending");
    }
  }

  bool same_rule(const Checklist& o) const { return item_ids == o.item_ids && M == o.M; }
};

// Canonical checklist over `data`'s items; ids are sorted.
inline Checklist make_checklist(const BinaryDataset& data, std::vector<int> ids, int M,
                                std::string method = "mip") {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  Checklist c;
  c.item_ids = std::move(ids);
  c.M = M;
  c.provenance.method = std::move(method);
  c.validate(data.d);
  for (int j : c.item_ids) {
    c.item_names.push_back(data.items[static_cast<std::size_t>(j)].name);
    c.item_defs.push_back(data.items[static_cast<std::size_t>(j)]);
  }
  return c;
}

inline int score(const Checklist& c, std::span<const std::uint8_t> x) {
  int s = 0;
  for (int j : c.item_ids) {
    require(j >= 0 && static_cast<std::size_t>(j) < x.size(), ErrorCode::IndexOutOfRange,
            "item index " + std::to_string(j) + " beyond feature vector of length " + std::to_string(x.size()));
    s += x[static_cast<std::size_t>(j)];
  }
  return s;
}

inline int predict(const Checklist& c, std::span<const std::uint8_t> x) { return score(c, x) >= c.M ? 1 : -1; }

inline std::vector<int> predict_all(const Checklist& c, const BinaryDataset& data) {
  std::vector<int> out(data.n);
  for (std::size_t i = 0; i < data.n; ++i) out[i] = predict(c, data.row(i));
  return out;
}

// ---------------------------------------------------------------------------
// Confusion counts

inline std::optional<double> rate(std::size_t errors, std::size_t total) {
  if (total == 0) return std::nullopt;  // undefined, never reported as 0
  return static_cast<double>(errors) / static_cast<double>(total);
}

struct GroupCounts {
  std::size_t fn = 0;     // l_g^+
  std::size_t n_pos = 0;  // n_g^+
  std::size_t fp = 0;     // l_g^-
  std::size_t n_neg = 0;  // n_g^-

  std::optional<double> fnr() const { return rate(fn, n_pos); }
  std::optional<double> fpr() const { return rate(fp, n_neg); }
};

struct ConfusionReport {
  std::size_t fn = 0;  // l^+: positives predicted -1
  std::size_t fp = 0;  // l^-: negatives predicted +1
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::vector<GroupCounts> per_group;
  std::vector<std::string> group_names;

  std::size_t mistakes() const { return fn + fp; }
  std::optional<double> fnr() const { return rate(fn, n_pos); }
  std::optional<double> fpr() const { return rate(fp, n_neg); }
  std::optional<double> error() const { return rate(fn + fp, n_pos + n_neg); }
};

inline ConfusionReport confusion(const Checklist& c, const BinaryDataset& data) {
  ConfusionReport r;
  r.group_names = data.group_names;
  if (data.has_groups()) r.per_group.resize(data.group_names.size());
  for (std::size_t i = 0; i < data.n; ++i) {
    const int yhat = predict(c, data.row(i));
    const bool pos = data.y[i] == 1;
    const bool wrong = yhat != data.y[i];
    GroupCounts* g = data.has_groups() ? &r.per_group[static_cast<std::size_t>(data.group_labels[i])] : nullptr;
    if (pos) {
      ++r.n_pos;
      r.fn += wrong;
      if (g) {
        ++g->n_pos;
        g->fn += wrong;
      }
    } else {
      ++r.n_neg;
      r.fp += wrong;
      if (g) {
        ++g->n_neg;
        g->fp += wrong;
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Objective

struct Penalties {
  double eps_n = 0.0;
  double eps_m = 0.0;
};

// eps_N = 0.9/(n d) and eps_M = 0.9 eps_N / d, scaled by min(1, W-) so that a
// single (weighted) mistake always outweighs any sparsity preference.
inline Penalties default_penalties(std::size_t n, std::size_t d, double w_minus = 1.0) {
  require(n > 0 && d > 0, ErrorCode::InvalidArgument, "penalties need n > 0 and d > 0");
  const double s = std::min(1.0, w_minus);
  const double nd = static_cast<double>(n) * static_cast<double>(d);
  Penalties p;
  p.eps_n = s * 0.9 / nd;
  p.eps_m = s * 0.81 / (nd * static_cast<double>(d));
  return p;
}

inline double objective_value(std::size_t fn, std::size_t fp, int N, int M, double w_minus, double eps_n,
                              double eps_m) {
  return static_cast<double>(fn) + w_minus * static_cast<double>(fp) + eps_n * N + eps_m * M;
}

// l+ + W- l- + eps_N N + eps_M M
inline double objective(const Checklist& c, const BinaryDataset& data, double w_minus, double eps_n, double eps_m) {
  require(w_minus > 0, ErrorCode::InvalidArgument, "w_minus must be positive");
  require(eps_n >= 0 && eps_m >= 0, ErrorCode::InvalidArgument, "penalties must be non-negative");
  const auto r = confusion(c, data);
  return objective_value(r.fn, r.fp, c.N(), c.M, w_minus, eps_n, eps_m);
}

inline double objective(const Checklist& c, const BinaryDataset& data, double w_minus = 1.0) {
  const auto p = default_penalties(data.n, data.d, w_minus);
  return objective(c, data, w_minus, p.eps_n, p.eps_m);
}

// ---------------------------------------------------------------------------
// Optimality gap

struct GapReport {
  double v_max = 0.0;
  double v_min = 0.0;
  double gap = 0.0;
  std::optional<double> loss;         // L: the incumbent's (weighted) mistakes
  std::optional<double> floor_value;  // (1 - gap) L - slack, unrounded
  std::optional<long long> floor_error;  // ceil of floor_value: no feasible checklist does better

  bool certified_optimal() const { return gap <= 1e-9; }
};

// gap = 1 - v_min / v_max. `slack` is an upper bound on the non-mistake part
// of the objective (the sparsity penalties); subtracting it keeps the
// mistake floor valid when v_min includes those penalties.
inline GapReport optimality_gap(double v_max, double v_min, std::optional<double> loss = std::nullopt,
                                double slack = 0.0) {
  const double tol = 1e-12 * std::max(1.0, std::abs(v_max));
  if (v_min > v_max + tol)
    throw Error(ErrorCode::BoundInversion,
                "lower bound " + std::to_string(v_min) + " exceeds upper bound " + std::to_string(v_max));
  require(v_min >= -tol, ErrorCode::InvalidArgument, "bounds must be non-negative");
  GapReport g;
  g.v_max = v_max;
  g.v_min = std::min(v_min, v_max);
  g.gap = v_max > 0 ? 1.0 - g.v_min / v_max : 0.0;
  if (g.gap < 0) g.gap = 0;
  if (loss) {
    g.loss = loss;
    const double f = (1.0 - g.gap) * *loss - slack;
    g.floor_value = std::max(0.0, f);
    g.floor_error = static_cast<long long>(std::ceil(*g.floor_value - 1e-9));
    if (*g.floor_error < 0) g.floor_error = 0;
  }
  return g;
}

}  // namespace checklist
