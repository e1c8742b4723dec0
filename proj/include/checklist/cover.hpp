#pragma once

// Knapsack-cover heuristic: greedy maximization of truncated positive
// coverage under a budget on negative coverage, a cardinality cap and
// (optionally) one item per feature group.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "checklist/bits.hpp"
#include "checklist/core.hpp"
#include "checklist/dataset.hpp"
#include "checklist/error.hpp"
#include "checklist/pool.hpp"

namespace checklist {

// f_M(A) = sum over positive rows of min(#items of A in the row, M).
inline std::int64_t coverage(const BinaryDataset& data, const std::vector<int>& A, int M) {
  std::int64_t f = 0;
  for (std::size_t i = 0; i < data.n; ++i) {
    if (data.y[i] != 1) continue;
    int c = 0;
    for (int j : A) c += data.at(i, static_cast<std::size_t>(j));
    f += std::min(c, M);
  }
  return f;
}

struct CoverInstance {
  const BinaryDataset* data = nullptr;
  int M = 1;
  int n_max = 8;
  double budget = 1.0;
  bool partition = false;  // at most one item per feature group
  std::vector<std::int64_t> costs;  // negatives containing each item

  void validate() const {
    require(data != nullptr, ErrorCode::InvalidArgument, "cover instance without data");
    require(budget > 0, ErrorCode::InvalidArgument, "budget must be positive");
    require(M >= 1 && M <= n_max, ErrorCode::InvalidArgument, "need 1 <= M <= N_max");
    require(costs.size() == data->d, ErrorCode::InvalidArgument, "one cost per item");
  }
};

inline CoverInstance make_cover_instance(const BinaryDataset& data, int M, int n_max, double budget,
                                         bool partition = false) {
  CoverInstance inst;
  inst.data = &data;
  inst.M = M;
  inst.n_max = n_max;
  inst.budget = budget;
  inst.partition = partition;
  inst.costs.assign(data.d, 0);
  for (std::size_t i = 0; i < data.n; ++i)
    if (data.y[i] == -1)
      for (std::size_t j = 0; j < data.d; ++j) inst.costs[j] += data.at(i, j);
  inst.validate();
  return inst;
}

struct GreedyConfig {
  double epsilon = 0.2;
  std::optional<int> p;  // matroid count; defaults to 2 with the partition, else 1
  // Density test on the candidate's own cost instead of the accumulated cost of S.
  bool candidate_density = false;

  void validate() const {
    require(epsilon > 0, ErrorCode::InvalidArgument, "epsilon must be positive");
    if (p) require(*p >= 1, ErrorCode::InvalidArgument, "p must be >= 1");
  }
};

namespace detail {

// Coverage of S with O(n/64) marginal gains.
class CoverageState {
 public:
  CoverageState(const BinaryDataset& data, int M, const std::vector<BitSet>& cols, const BitSet& pos)
      : M_(M), cols_(cols), counts_(data.n, 0), open_(pos) {}

  std::int64_t gain(int j) const { return static_cast<std::int64_t>(cols_[static_cast<std::size_t>(j)].and_count(open_)); }

  void add(int j) {
    const auto& col = cols_[static_cast<std::size_t>(j)];
    BitSet hit = col;
    hit &= open_;
    hit.for_each([&](std::size_t i) {
      if (++counts_[i] >= M_) open_.reset(i);
    });
    value_ += static_cast<std::int64_t>(hit.count());
  }

  std::int64_t value() const { return value_; }

 private:
  int M_;
  const std::vector<BitSet>& cols_;
  std::vector<int> counts_;
  BitSet open_;  // positives with fewer than M selected items
  std::int64_t value_ = 0;
};

}  // namespace detail

inline std::vector<std::vector<int>> greedy_knapsack_cover(const CoverInstance& inst, const GreedyConfig& cfg = {}) {
  inst.validate();
  cfg.validate();
  const auto& data = *inst.data;
  const double B = inst.budget;
  const double eps = cfg.epsilon;
  const int p = cfg.p.value_or(inst.partition ? 2 : 1);

  std::vector<BitSet> cols(data.d, BitSet(data.n));
  BitSet pos(data.n);
  for (std::size_t i = 0; i < data.n; ++i) {
    if (data.y[i] == 1) pos.set(i);
    for (std::size_t j = 0; j < data.d; ++j)
      if (data.at(i, j)) cols[j].set(i);
  }
  std::vector<int> group_of(data.d, -1);
  for (std::size_t t = 0; t < data.feature_groups.size(); ++t)
    for (int j : data.feature_groups[t]) group_of[static_cast<std::size_t>(j)] = static_cast<int>(t);

  std::vector<int> ground;
  for (std::size_t j = 0; j < data.d; ++j)
    if (static_cast<double>(inst.costs[j]) <= B) ground.push_back(static_cast<int>(j));
  std::vector<std::int64_t> single(data.d, 0);
  std::int64_t m = 0;
  for (int j : ground) {
    single[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(cols[static_cast<std::size_t>(j)].and_count(pos));
    m = std::max(m, single[static_cast<std::size_t>(j)]);
  }
  std::vector<std::vector<int>> out;
  if (m == 0 || ground.empty()) return out;
  std::set<std::vector<int>> seen;
  auto record = [&](std::vector<int> s) {
    if (s.empty()) return;
    std::sort(s.begin(), s.end());
    if (seen.insert(s).second) out.push_back(std::move(s));
  };
  const auto cost = [&](int j) { return static_cast<double>(inst.costs[static_cast<std::size_t>(j)]); };
  const double inf = std::numeric_limits<double>::infinity();
  auto density = [&](double gain, double denom_cost) { return denom_cost <= 0 ? inf : gain / (denom_cost / B); };

  const double n_ground = static_cast<double>(ground.size());
  const double md = static_cast<double>(m);
  const double rho_hi = 2.0 * n_ground * md / (p + 1);
  for (double rho = md / (p + 1); rho <= rho_hi * (1 + 1e-12); rho *= 1 + eps) {
    double tau = -1.0;
    for (int j : ground) {
      const double f = static_cast<double>(single[static_cast<std::size_t>(j)]);
      if (density(f, cost(j)) >= rho) tau = std::max(tau, f);
    }
    if (tau < 0) continue;

    std::vector<int> S;
    std::vector<char> in_S(data.d, 0), group_used(data.feature_groups.size(), 0);
    double spent = 0.0;
    detail::CoverageState state(data, inst.M, cols, pos);
    bool overflow = false;
    while (!overflow && tau >= eps * md / n_ground && spent <= B) {
      for (int j : ground) {
        const auto uj = static_cast<std::size_t>(j);
        if (in_S[uj] || static_cast<int>(S.size()) >= inst.n_max) continue;
        if (inst.partition && group_of[uj] >= 0 && group_used[static_cast<std::size_t>(group_of[uj])]) continue;
        const auto delta = static_cast<double>(state.gain(j));
        if (delta < tau) continue;
        const double denom = cfg.candidate_density ? cost(j) : spent;
        if (density(delta, denom) < rho) continue;
        S.push_back(j);
        in_S[uj] = 1;
        if (inst.partition && group_of[uj] >= 0) group_used[static_cast<std::size_t>(group_of[uj])] = 1;
        spent += cost(j);
        state.add(j);
        if (spent > B) {
          record(std::vector<int>(S.begin(), S.end() - 1));
          record({j});
          overflow = true;
          break;
        }
      }
      if (static_cast<int>(S.size()) >= inst.n_max) break;
      tau /= 1 + eps;
    }
    if (!overflow) record(S);
  }
  return out;
}

struct SweepConfig {
  int n_max = 8;
  std::vector<double> budgets;  // empty: {n+/3, n+/2, n+, 2n+, 3n+}
  std::vector<int> m_values;    // empty: 1..n_max
  bool one_per_group = false;
  GreedyConfig greedy;
  double w_minus = 1.0;
};

inline std::vector<double> default_budgets(const BinaryDataset& data) {
  const auto np = static_cast<double>(data.n_pos());
  return {np / 3.0, np / 2.0, np, 2.0 * np, 3.0 * np};
}

// Runs the greedy for every (M, B) pair and pools the resulting checklists,
// sorted by objective.
inline ChecklistPool cover_sweep(const BinaryDataset& data, const SweepConfig& cfg = {}) {
  require(cfg.n_max >= 1, ErrorCode::InvalidArgument, "N_max must be >= 1");
  auto budgets = cfg.budgets.empty() ? default_budgets(data) : cfg.budgets;
  for (double b : budgets) require(b > 0, ErrorCode::InvalidArgument, "budgets must be positive");
  std::vector<int> ms = cfg.m_values;
  if (ms.empty())
    for (int M = 1; M <= cfg.n_max; ++M) ms.push_back(M);
  ChecklistPool pool(cfg.w_minus);
  for (int M : ms) {
    if (M < 1 || M > cfg.n_max) continue;
    for (double B : budgets) {
      const auto inst = make_cover_instance(data, M, cfg.n_max, B, cfg.one_per_group);
      for (const auto& A : greedy_knapsack_cover(inst, cfg.greedy)) {
        if (static_cast<int>(A.size()) < M) continue;
        auto c = make_checklist(data, A, M, "cover");
        c.provenance.notes["M"] = std::to_string(M);
        c.provenance.notes["B"] = format_number(B);
        const auto k = pool.add(c, data, "heuristic", "cover M=" + std::to_string(M) + " B=" + format_number(B));
        pool.entries()[k].meta.emplace("B", format_number(B));
      }
    }
  }
  pool.sort_by_objective();
  return pool;
}

}  // namespace checklist
