#pragma once

// Brute-force references used by the tests. Nothing here calls the solver,
// the compiler or check_feasible: feasibility and objectives are recomputed
// from their definitions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "checklist/constraints.hpp"
#include "checklist/dataset.hpp"

namespace oracle {

using checklist::BinaryDataset;
using checklist::ConstraintSet;

struct Eval {
  long fn = 0;
  long fp = 0;
  std::vector<long> gfn, gfp, gpos, gneg;
};

inline Eval evaluate(const BinaryDataset& data, const std::vector<int>& items, int M) {
  Eval e;
  const std::size_t G = data.group_names.size();
  e.gfn.assign(G, 0);
  e.gfp.assign(G, 0);
  e.gpos.assign(G, 0);
  e.gneg.assign(G, 0);
  for (std::size_t i = 0; i < data.n; ++i) {
    int s = 0;
    for (int j : items) s += data.x[i * data.d + static_cast<std::size_t>(j)];
    const int yhat = s >= M ? 1 : -1;
    const bool wrong = yhat != data.y[i];
    const long g = data.group_labels.empty() ? -1 : data.group_labels[i];
    if (data.y[i] == 1) {
      e.fn += wrong;
      if (g >= 0) {
        e.gfn[static_cast<std::size_t>(g)] += wrong;
        ++e.gpos[static_cast<std::size_t>(g)];
      }
    } else {
      e.fp += wrong;
      if (g >= 0) {
        e.gfp[static_cast<std::size_t>(g)] += wrong;
        ++e.gneg[static_cast<std::size_t>(g)];
      }
    }
  }
  return e;
}

// Allowed mistakes under a cap: ceil(frac * total) evaluated in exact
// rationals after snapping frac to a multiple of 1e-9.
inline long allowed(double frac, long total) {
  const long long num = std::llround(frac * 1e9);
  const long long prod = num * total;
  return static_cast<long>((prod + 999999999LL) / 1000000000LL);
}

// Rational disparity test |la/na - lb/nb| <= gamma with gamma snapped to 1e-9.
inline bool within_gap(long la, long na, long lb, long nb, double gamma) {
  const long long g = std::llround(gamma * 1e9);
  const long long lhs = (static_cast<long long>(la) * nb - static_cast<long long>(lb) * na);
  return std::llabs(lhs) * 1000000000LL <= g * static_cast<long long>(na) * nb;
}

inline bool feasible(const BinaryDataset& data, const ConstraintSet& c, const std::vector<int>& items, int M) {
  const int N = static_cast<int>(items.size());
  if (N < 1 || M < 1 || M > N) return false;
  if (c.max_items && N > *c.max_items) return false;
  if (c.min_items && N < *c.min_items) return false;
  if (c.m_min && M < *c.m_min) return false;
  if (c.m_max && M > *c.m_max) return false;
  std::vector<char> sel(data.d, 0);
  for (int j : items) sel[static_cast<std::size_t>(j)] = 1;
  if (c.one_per_group)
    for (const auto& g : data.feature_groups) {
      int k = 0;
      for (int j : g) k += sel[static_cast<std::size_t>(j)];
      if (k > 1) return false;
    }
  for (const auto& [a, b] : c.implications) {
    const int ia = std::get<int>(a), ib = std::get<int>(b);
    if (sel[static_cast<std::size_t>(ia)] && !sel[static_cast<std::size_t>(ib)]) return false;
  }
  for (const auto& pred : c.force_positive) {
    for (std::size_t i = 0; i < data.n; ++i) {
      bool match = true;
      for (const auto& r : pred) match = match && data.x[i * data.d + static_cast<std::size_t>(std::get<int>(r))];
      if (!match) continue;
      int s = 0;
      for (int j : items) s += data.x[i * data.d + static_cast<std::size_t>(j)];
      if (s < M) return false;
    }
  }
  const auto e = evaluate(data, items, M);
  const long np = static_cast<long>(std::count(data.y.begin(), data.y.end(), 1));
  const long nn = static_cast<long>(data.n) - np;
  if (c.fnr_cap && e.fn > allowed(*c.fnr_cap, np)) return false;
  if (c.fpr_cap && e.fp > allowed(*c.fpr_cap, nn)) return false;
  for (const auto& [name, frac] : c.group_fnr_caps) {
    const auto g = static_cast<std::size_t>(data.find_group(name));
    if (e.gfn[g] > allowed(frac, e.gpos[g])) return false;
  }
  const std::size_t G = data.group_names.size();
  for (std::size_t a = 0; a < G; ++a)
    for (std::size_t b = a + 1; b < G; ++b) {
      if (c.group_fpr_gap && e.gneg[a] > 0 && e.gneg[b] > 0 &&
          !within_gap(e.gfp[a], e.gneg[a], e.gfp[b], e.gneg[b], *c.group_fpr_gap))
        return false;
      if (c.group_fnr_gap && e.gpos[a] > 0 && e.gpos[b] > 0 &&
          !within_gap(e.gfn[a], e.gpos[a], e.gfn[b], e.gpos[b], *c.group_fnr_gap))
        return false;
    }
  return true;
}

// Objective l+ + W l- + eps_N N + eps_M M with the default penalties,
// multiplied through by 100 n d^2 q where W = p/q. Exact.
struct Weights {
  long long pos, neg, items, thr;
};

inline Weights weights(std::size_t n, std::size_t d, long long p, long long q) {
  const long long n_ = static_cast<long long>(n), d_ = static_cast<long long>(d);
  const long long s = std::min(p, q);
  return {100 * n_ * d_ * d_ * q, 100 * n_ * d_ * d_ * p, 90 * d_ * s, 81 * s};
}

inline long long value(const Weights& w, long fn, long fp, int N, int M) {
  return w.pos * fn + w.neg * fp + w.items * N + w.thr * M;
}

struct Best {
  std::optional<long long> value;
  std::vector<int> items;
  int M = 0;
  long fn = 0, fp = 0;
};

// Exhaustive search over item subsets of size <= cap and all thresholds.
// The first optimum in (size, lexicographic subset, M) order is kept.
inline Best brute_force(const BinaryDataset& data, const ConstraintSet& c, long long p = 1, long long q = 1) {
  const auto w = weights(data.n, data.d, p, q);
  Best best;
  const int d = static_cast<int>(data.d);
  const int cap = std::min(d, c.max_items.value_or(d));
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    std::vector<int> items;
    for (int j = 0; j < d; ++j)
      if (mask >> j & 1u) items.push_back(j);
    if (static_cast<int>(items.size()) > cap) continue;
    for (int M = 1; M <= static_cast<int>(items.size()); ++M) {
      if (!feasible(data, c, items, M)) continue;
      const auto e = evaluate(data, items, M);
      const auto v = value(w, e.fn, e.fp, static_cast<int>(items.size()), M);
      if (!best.value || v < *best.value) best = {v, items, M, e.fn, e.fp};
    }
  }
  return best;
}

// Random n x d instance with labels correlated to a planted rule.
inline BinaryDataset random_instance(std::mt19937_64& rng, std::size_t n, std::size_t d, double density = 0.4,
                                     int n_groups = 0, int feature_group_size = 1) {
  std::bernoulli_distribution bit(density), noise(0.15);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(d) - 1);
  const int a = pick(rng), b = pick(rng);
  std::vector<std::vector<int>> rows(n, std::vector<int>(d));
  std::vector<int> y(n), g;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) rows[i][j] = bit(rng);
    const bool planted = rows[i][static_cast<std::size_t>(a)] + rows[i][static_cast<std::size_t>(b)] >= 1;
    y[i] = (planted != noise(rng)) ? 1 : -1;
  }
  if (y == std::vector<int>(n, y[0])) y[0] = -y[0];
  if (n_groups > 0) {
    std::uniform_int_distribution<int> gd(0, n_groups - 1);
    for (std::size_t i = 0; i < n; ++i) g.push_back(static_cast<int>(i) < n_groups ? static_cast<int>(i) : gd(rng));
  }
  auto ds = checklist::make_dataset(rows, y, g);
  if (feature_group_size > 1) {
    ds.feature_groups.clear();
    for (std::size_t j = 0; j < d; j += static_cast<std::size_t>(feature_group_size)) {
      std::vector<int> grp;
      for (std::size_t k = j; k < std::min(d, j + static_cast<std::size_t>(feature_group_size)); ++k)
        grp.push_back(static_cast<int>(k));
      ds.feature_groups.push_back(grp);
    }
  }
  return ds;
}

// D0: rows (1,1,0)+, (1,0,0)+, (0,1,1)-, (0,0,0)-.
inline BinaryDataset d0() {
  return checklist::make_dataset({{1, 1, 0}, {1, 0, 0}, {0, 1, 1}, {0, 0, 0}}, {1, 1, -1, -1});
}

}  // namespace oracle
