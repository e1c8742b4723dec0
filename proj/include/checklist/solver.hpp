#pragma once

// Best-first branch-and-bound over (M, lambda) for compiled checklist
// instances, with a combinatorial lower bound, greedy rounding and a
// local-search polish of incumbents.

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "checklist/bits.hpp"
#include "checklist/constraints.hpp"
#include "checklist/core.hpp"
#include "checklist/error.hpp"

namespace checklist {

enum class SolveStatus { Optimal, Feasible, Infeasible, NoSolutionFound };
enum class StopReason { Exhausted, TimeLimit, NodeLimit, TargetGap };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NoSolutionFound: return "no_solution_found";
  }
  return "unknown";
}

inline std::string_view to_string(StopReason s) {
  switch (s) {
    case StopReason::Exhausted: return "exhausted";
    case StopReason::TimeLimit: return "time_limit";
    case StopReason::NodeLimit: return "node_limit";
    case StopReason::TargetGap: return "target_gap";
  }
  return "unknown";
}

struct SolveConfig {
  double time_limit = 60.0;  // seconds
  std::optional<std::size_t> node_limit;
  std::vector<Checklist> warm_starts;
  double target_gap = 0.0;
  bool deterministic = true;
  int workers = 1;
  bool polish = true;  // local search on every new incumbent

  void validate() const {
    require(time_limit > 0, ErrorCode::InvalidArgument, "time_limit must be positive");
    require(target_gap >= 0 && target_gap <= 1, ErrorCode::InvalidArgument, "target_gap must lie in [0,1]");
    require(workers >= 1, ErrorCode::InvalidArgument, "workers must be >= 1");
  }
};

struct BoundSample {
  double time = 0.0;
  double v_max = 0.0;
  double v_min = 0.0;
  std::size_t nodes = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NoSolutionFound;
  StopReason stop_reason = StopReason::Exhausted;
  std::optional<Checklist> incumbent;
  double v_max = std::numeric_limits<double>::infinity();
  double v_min = 0.0;
  double gap = 1.0;
  std::size_t nodes_explored = 0;
  double wall_time = 0.0;
  std::vector<BoundSample> bound_trace;
  double max_penalty = 0.0;  // largest possible eps_N N + eps_M M

  // Gap plus the implied floor on the incumbent's mistakes.
  GapReport gap_report(std::optional<double> loss = std::nullopt) const {
    if (!incumbent) return GapReport{v_max, v_min, gap, std::nullopt, std::nullopt, std::nullopt};
    return optimality_gap(v_max, v_min, loss, max_penalty);
  }
};

// A node fixes items in `in` to 1 and items in `out` to 0 for one threshold M.
struct NodeState {
  BitSet in;
  BitSet out;
  int M = 1;
};

struct Candidate {
  std::vector<int> ids;  // ascending
  int M = 1;
  std::int64_t value = 0;
};

// Precomputed bitset views of an instance plus the per-node routines.
class SearchSpace {
 public:
  static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

  explicit SearchSpace(const IPInstance& ip) : ip_(ip), n_(ip.n()), d_(ip.d()) {
    const auto& w = ip.weights;
    c_pos_ = w.pos;
    c_neg_ = w.neg;
    c_n_ = w.items;
    c_m_ = w.threshold;
    col_.assign(d_, BitSet(n_));
    row_.assign(n_, BitSet(d_));
    pos_ = BitSet(n_);
    neg_ = BitSet(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      (ip.data.y[i] == 1 ? pos_ : neg_).set(i);
      for (std::size_t j = 0; j < d_; ++j)
        if (ip.data.at(i, j)) {
          col_[j].set(i);
          row_[i].set(j);
        }
    }
    group_of_.assign(d_, -1);
    for (std::size_t t = 0; t < ip.data.feature_groups.size(); ++t)
      for (int j : ip.data.feature_groups[t]) group_of_[static_cast<std::size_t>(j)] = static_cast<int>(t);
    n_groups_ = ip.data.feature_groups.size();
    requires_.assign(d_, {});
    required_by_.assign(d_, {});
    for (const auto& [a, b] : ip.implications) {
      if (a == b) continue;
      requires_[static_cast<std::size_t>(a)].push_back(b);
      required_by_[static_cast<std::size_t>(b)].push_back(a);
    }
    if (ip.data.has_groups()) {
      row_group_.assign(ip.data.group_labels.begin(), ip.data.group_labels.end());
      n_prot_ = ip.data.group_names.size();
    }
  }

  const IPInstance& instance() const { return ip_; }

  std::optional<NodeState> root(int M) const {
    NodeState s{BitSet(d_), BitSet(d_), M};
    if (!propagate(s)) return std::nullopt;
    return s;
  }

  bool is_leaf(const NodeState& s) const { return s.in.count() + s.out.count() == d_; }

  // Closes the node under implications, group at-most-one and cardinality.
  // Returns false when no completion can be feasible.
  bool propagate(NodeState& s) const {
    if (s.in.intersects(s.out)) return false;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& [a, b] : ip_.implications) {
        const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
        if (s.in.test(ua) && !s.in.test(ub)) {
          if (s.out.test(ub)) return false;
          s.in.set(ub);
          changed = true;
        }
        if (s.out.test(ub) && !s.out.test(ua)) {
          if (s.in.test(ua)) return false;
          s.out.set(ua);
          changed = true;
        }
      }
      if (ip_.one_per_group) {
        for (const auto& g : ip_.data.feature_groups) {
          int chosen = -1, used = 0;
          for (int j : g)
            if (s.in.test(static_cast<std::size_t>(j))) {
              chosen = j;
              ++used;
            }
          if (used > 1) return false;
          if (used == 1)
            for (int j : g)
              if (j != chosen && !s.out.test(static_cast<std::size_t>(j))) {
                s.out.set(static_cast<std::size_t>(j));
                changed = true;
              }
        }
      }
      const auto n_in = static_cast<int>(s.in.count());
      if (n_in > ip_.n_max) return false;
      if (n_in == ip_.n_max)
        for (std::size_t j = 0; j < d_; ++j)
          if (!s.in.test(j) && !s.out.test(j)) {
            s.out.set(j);
            changed = true;
          }
    }
    const int n_in = static_cast<int>(s.in.count());
    const int need = std::max(s.M, ip_.n_min);
    return n_in + std::min(ip_.n_max - n_in, usable_free(s)) >= need;
  }

  // Valid lower bound (scaled integer) on every feasible completion of the
  // node; kInf when no feasible completion exists.
  std::int64_t lower_bound(const NodeState& s) const { return analyze(s, nullptr); }

  // Branching item: free item with the largest |c+ g_j - c- h_j|, lowest index on ties.
  int branch_item(const NodeState& s) const {
    int item = -1;
    analyze(s, &item);
    return item;
  }

  // Exact scaled objective of (ids, M), or nullopt when infeasible.
  std::optional<std::int64_t> evaluate(const std::vector<int>& ids, int M) const {
    const int N = static_cast<int>(ids.size());
    if (N < ip_.n_min || N > ip_.n_max || M < ip_.m_min || M > ip_.m_max || M > N) return std::nullopt;
    for (std::size_t k = 0; k < ids.size(); ++k)
      if (ids[k] < 0 || static_cast<std::size_t>(ids[k]) >= d_ || (k && ids[k] <= ids[k - 1])) return std::nullopt;
    BitSet chosen(d_);
    for (int j : ids) chosen.set(static_cast<std::size_t>(j));
    for (const auto& [a, b] : ip_.implications)
      if (chosen.test(static_cast<std::size_t>(a)) && !chosen.test(static_cast<std::size_t>(b))) return std::nullopt;
    if (ip_.one_per_group) {
      std::vector<char> used(n_groups_, 0);
      for (int j : ids) {
        const int g = group_of_[static_cast<std::size_t>(j)];
        if (g < 0) continue;
        if (used[static_cast<std::size_t>(g)]) return std::nullopt;
        used[static_cast<std::size_t>(g)] = 1;
      }
    }
    const auto counts = row_counts(ids);
    for (int i : ip_.forced_rows)
      if (counts[static_cast<std::size_t>(i)] < M) return std::nullopt;
    std::int64_t fn = 0, fp = 0;
    std::vector<std::int64_t> gfn(n_prot_, 0), gfp(n_prot_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      const bool yhat = counts[i] >= M;
      if (pos_.test(i) && !yhat) {
        ++fn;
        if (n_prot_) ++gfn[static_cast<std::size_t>(row_group_[i])];
      } else if (neg_.test(i) && yhat) {
        ++fp;
        if (n_prot_) ++gfp[static_cast<std::size_t>(row_group_[i])];
      }
    }
    if (ip_.max_fn && fn > *ip_.max_fn) return std::nullopt;
    if (ip_.max_fp && fp > *ip_.max_fp) return std::nullopt;
    for (const auto& gc : ip_.group_caps)
      if (gfn[static_cast<std::size_t>(gc.group)] > gc.max_fn) return std::nullopt;
    for (const auto& dsp : ip_.disparities) {
      const auto& l = dsp.positives ? gfn : gfp;
      if (dsp.coef_a * l[static_cast<std::size_t>(dsp.a)] - dsp.coef_b * l[static_cast<std::size_t>(dsp.b)] > dsp.rhs)
        return std::nullopt;
    }
    return ip_.weights.value(fn, fp, N, M);
  }

  // Greedy completion: add the `need` cheapest items, then keep adding while
  // the objective strictly improves. Returns a feasible candidate or nothing.
  std::optional<Candidate> rounding_pass(const NodeState& s) const {
    if (s.in.intersects(s.out)) return std::nullopt;
    std::vector<int> S;
    s.in.for_each([&](std::size_t j) { S.push_back(static_cast<int>(j)); });
    const int M = s.M;
    if (static_cast<int>(S.size()) > ip_.n_max) return std::nullopt;
    std::vector<char> group_used(n_groups_, 0);
    if (ip_.one_per_group)
      for (int j : S) {
        const int g = group_of_[static_cast<std::size_t>(j)];
        if (g < 0) continue;
        if (group_used[static_cast<std::size_t>(g)]) return std::nullopt;
        group_used[static_cast<std::size_t>(g)] = 1;
      }
    BitSet taken = s.in;
    auto counts = row_counts(S);
    const int need = std::max(M, ip_.n_min);
    BitSet edge(n_);  // rows with count == M - 1
    while (static_cast<int>(S.size()) < ip_.n_max) {
      edge.clear();
      for (std::size_t i = 0; i < n_; ++i)
        if (counts[i] == M - 1) edge.set(i);
      std::int64_t best_delta = kInf;
      std::vector<int> best_add;
      std::vector<int> closure;
      for (std::size_t j = 0; j < d_; ++j) {
        if (taken.test(j) || s.out.test(j)) continue;
        if (!closure_of(static_cast<int>(j), taken, s.out, group_used, closure)) continue;
        if (static_cast<int>(S.size() + closure.size()) > ip_.n_max) continue;
        std::int64_t delta = 0;
        if (closure.size() == 1) {
          delta = c_n_ - c_pos_ * static_cast<std::int64_t>(col_[j].and_count(edge, pos_)) +
                  c_neg_ * static_cast<std::int64_t>(col_[j].and_count(edge, neg_));
        } else {
          delta = add_delta(counts, closure, M);
        }
        if (delta < best_delta) {
          best_delta = delta;
          best_add = closure;
        }
      }
      if (best_add.empty()) break;
      if (static_cast<int>(S.size()) >= need && best_delta >= 0) break;
      for (int j : best_add) {
        S.push_back(j);
        taken.set(static_cast<std::size_t>(j));
        const int g = group_of_[static_cast<std::size_t>(j)];
        if (ip_.one_per_group && g >= 0) group_used[static_cast<std::size_t>(g)] = 1;
        col_[static_cast<std::size_t>(j)].for_each([&](std::size_t i) { ++counts[i]; });
      }
    }
    std::sort(S.begin(), S.end());
    const auto v = evaluate(S, M);
    if (!v) return std::nullopt;
    return Candidate{std::move(S), M, *v};
  }

  // Best-improvement local search over add / remove / swap / M +- 1 moves.
  Candidate polish(Candidate c, int max_rounds = 50) const {
    for (int round = 0; round < max_rounds; ++round) {
      Candidate best = c;
      auto consider = [&](std::vector<int> ids, int M) {
        std::sort(ids.begin(), ids.end());
        const auto v = evaluate(ids, M);
        if (v && *v < best.value) best = Candidate{std::move(ids), M, *v};
      };
      consider(c.ids, c.M - 1);
      consider(c.ids, c.M + 1);
      BitSet chosen(d_);
      for (int j : c.ids) chosen.set(static_cast<std::size_t>(j));
      for (std::size_t k = 0; k < c.ids.size(); ++k) {
        auto ids = c.ids;
        ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(k));
        consider(ids, c.M);
        if (c.M > 1) consider(ids, c.M - 1);
      }
      for (std::size_t j = 0; j < d_; ++j) {
        if (chosen.test(j)) continue;
        auto ids = c.ids;
        ids.push_back(static_cast<int>(j));
        consider(ids, c.M);
        consider(ids, c.M + 1);
        for (std::size_t k = 0; k < c.ids.size(); ++k) {
          auto sw = c.ids;
          sw[k] = static_cast<int>(j);
          consider(sw, c.M);
        }
      }
      if (best.value >= c.value) break;
      c = std::move(best);
    }
    return c;
  }

  std::vector<int> row_counts(const std::vector<int>& ids) const {
    std::vector<int> counts(n_, 0);
    for (int j : ids) col_[static_cast<std::size_t>(j)].for_each([&](std::size_t i) { ++counts[i]; });
    return counts;
  }

 private:
  // Number of additional items that can still be chosen ignoring cardinality.
  int usable_free(const NodeState& s) const {
    if (!ip_.one_per_group) return static_cast<int>(d_ - s.in.count() - s.out.count());
    int usable = 0;
    for (std::size_t j = 0; j < d_; ++j) {
      if (s.in.test(j) || s.out.test(j)) continue;
      if (group_of_[j] < 0) {
        ++usable;
        continue;
      }
      // count each group once, at its lowest free index
      bool first = true;
      for (int k : ip_.data.feature_groups[static_cast<std::size_t>(group_of_[j])]) {
        if (static_cast<std::size_t>(k) >= j) break;
        if (!s.in.test(static_cast<std::size_t>(k)) && !s.out.test(static_cast<std::size_t>(k))) first = false;
      }
      usable += first;
    }
    return usable;
  }

  // Items that must join S when j is added; false when that breaks a rule.
  bool closure_of(int j, const BitSet& taken, const BitSet& out, const std::vector<char>& group_used,
                  std::vector<int>& closure) const {
    closure.clear();
    std::vector<int> stack{j};
    BitSet seen(d_);
    seen.set(static_cast<std::size_t>(j));
    std::vector<char> used = group_used;
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      const auto uk = static_cast<std::size_t>(k);
      if (out.test(uk)) return false;
      if (ip_.one_per_group && group_of_[uk] >= 0) {
        auto& u = used[static_cast<std::size_t>(group_of_[uk])];
        if (u) return false;
        u = 1;
      }
      closure.push_back(k);
      for (int b : requires_[uk]) {
        const auto ub = static_cast<std::size_t>(b);
        if (taken.test(ub) || seen.test(ub)) continue;
        seen.set(ub);
        stack.push_back(b);
      }
    }
    return true;
  }

  std::int64_t add_delta(const std::vector<int>& counts, const std::vector<int>& items, int M) const {
    std::vector<int> extra(n_, 0);
    for (int j : items) col_[static_cast<std::size_t>(j)].for_each([&](std::size_t i) { ++extra[i]; });
    std::int64_t delta = c_n_ * static_cast<std::int64_t>(items.size());
    for (std::size_t i = 0; i < n_; ++i) {
      if (!extra[i]) continue;
      const bool before = counts[i] >= M, after = counts[i] + extra[i] >= M;
      if (before == after) continue;
      delta += pos_.test(i) ? -c_pos_ : c_neg_;
    }
    return delta;
  }

  std::int64_t analyze(const NodeState& s, int* branch) const {
    const int M = s.M;
    const int n_in = static_cast<int>(s.in.count());
    const int slots = ip_.n_max - n_in;
    const int need = std::max(M, ip_.n_min) - n_in;
    if (slots < 0 || need > slots) return kInf;

    BitSet free_items(d_);
    for (std::size_t j = 0; j < d_; ++j)
      if (!s.in.test(j) && !s.out.test(j)) free_items.set(j);

    // per-row count of selected items and of free items (or free groups) that could still be added
    std::vector<int> c_in(n_, 0);
    s.in.for_each([&](std::size_t j) { col_[j].for_each([&](std::size_t i) { ++c_in[i]; }); });
    std::vector<int> avail(n_, 0);
    if (!ip_.one_per_group) {
      for (std::size_t i = 0; i < n_; ++i) avail[i] = static_cast<int>(row_[i].and_count(free_items));
    } else {
      BitSet cover(n_);
      std::vector<char> done(n_groups_, 0);
      free_items.for_each([&](std::size_t j) {
        const int g = group_of_[j];
        if (g < 0) {
          col_[j].for_each([&](std::size_t i) { ++avail[i]; });
          return;
        }
        if (done[static_cast<std::size_t>(g)]) return;
        done[static_cast<std::size_t>(g)] = 1;
        cover.clear();
        for (int k : ip_.data.feature_groups[static_cast<std::size_t>(g)])
          if (free_items.test(static_cast<std::size_t>(k))) cover |= col_[static_cast<std::size_t>(k)];
        cover.for_each([&](std::size_t i) { ++avail[i]; });
      });
    }

    std::int64_t u_pos = 0, u_neg = 0;
    std::vector<std::int64_t> g_fn(n_prot_, 0);
    BitSet open_pos(n_), edge_neg(n_), live_neg(n_);
    std::vector<int> deficits;
    for (std::size_t i = 0; i < n_; ++i) {
      const int reach = c_in[i] + std::min(avail[i], slots);
      if (pos_.test(i)) {
        if (c_in[i] >= M) continue;
        if (reach < M) {
          ++u_pos;
          if (n_prot_) ++g_fn[static_cast<std::size_t>(row_group_[i])];
        } else {
          open_pos.set(i);
          deficits.push_back(M - c_in[i]);
        }
      } else {
        if (c_in[i] >= M) {
          ++u_neg;
        } else {
          live_neg.set(i);
          if (c_in[i] == M - 1) edge_neg.set(i);
        }
      }
    }
    for (int i : ip_.forced_rows) {
      const auto ui = static_cast<std::size_t>(i);
      if (c_in[ui] + std::min(avail[ui], slots) < M) return kInf;
    }
    if (ip_.max_fn && u_pos > *ip_.max_fn) return kInf;
    if (ip_.max_fp && u_neg > *ip_.max_fp) return kInf;
    for (const auto& gc : ip_.group_caps)
      if (g_fn[static_cast<std::size_t>(gc.group)] > gc.max_fn) return kInf;

    struct FreeItem {
      int j;
      std::int64_t g, h;
      int group;
    };
    std::vector<FreeItem> items;
    free_items.for_each([&](std::size_t j) {
      items.push_back({static_cast<int>(j), static_cast<std::int64_t>(col_[j].and_count(open_pos)),
                       static_cast<std::int64_t>(col_[j].and_count(edge_neg)), group_of_[j]});
    });

    if (branch) {
      std::int64_t best = -1;
      *branch = -1;
      for (const auto& it : items) {
        const auto jj = static_cast<std::size_t>(it.j);
        const std::int64_t pg = static_cast<std::int64_t>(col_[jj].and_count(open_pos));
        const std::int64_t ng = static_cast<std::int64_t>(col_[jj].and_count(live_neg));
        const std::int64_t score = std::abs(c_pos_ * pg - c_neg_ * ng);
        if (score > best) {
          best = score;
          *branch = it.j;
        }
      }
    }

    const std::int64_t base = c_pos_ * u_pos + c_neg_ * u_neg + c_m_ * M;
    const auto P = static_cast<std::int64_t>(deficits.size());
    std::sort(deficits.begin(), deficits.end());
    std::vector<std::int64_t> dsum(deficits.size() + 1, 0);
    for (std::size_t k = 0; k < deficits.size(); ++k) dsum[k + 1] = dsum[k] + deficits[k];

    std::int64_t best = kInf;
    if (need <= 0) best = base + c_pos_ * P + c_n_ * n_in;  // stop with the fixed items
    const int a0 = std::max(need, 1);
    if (a0 > slots || items.empty()) return best;

    std::stable_sort(items.begin(), items.end(), [](const FreeItem& x, const FreeItem& y) { return x.h < y.h; });
    std::vector<std::int64_t> gains;  // descending; one entry per item or per group
    std::vector<std::int64_t> group_best(n_groups_, -1);
    auto insert_gain = [&](std::int64_t v) {
      gains.insert(std::upper_bound(gains.begin(), gains.end(), v, std::greater<>()), v);
    };
    auto erase_gain = [&](std::int64_t v) {
      auto it = std::lower_bound(gains.begin(), gains.end(), v, std::greater<>());
      gains.erase(it);
    };
    std::size_t k = 0;
    while (k < items.size()) {
      const std::int64_t t = items[k].h;
      if (base + c_neg_ * t + c_n_ * (n_in + a0) >= best) break;
      for (; k < items.size() && items[k].h == t; ++k) {
        const auto& it = items[k];
        if (ip_.one_per_group && it.group >= 0) {
          auto& gb = group_best[static_cast<std::size_t>(it.group)];
          if (it.g <= gb) continue;
          if (gb >= 0) erase_gain(gb);
          gb = it.g;
        }
        insert_gain(it.g);
      }
      const int top = std::min<int>(slots, static_cast<int>(gains.size()));
      std::int64_t gsum = 0;
      std::int64_t corrected = 0;
      for (int a = 1; a <= top; ++a) {
        gsum += gains[static_cast<std::size_t>(a - 1)];
        if (a < a0) continue;
        while (corrected < P && dsum[static_cast<std::size_t>(corrected + 1)] <= gsum) ++corrected;
        const std::int64_t v = base + c_pos_ * (P - corrected) + c_neg_ * t + c_n_ * (n_in + a);
        best = std::min(best, v);
      }
    }
    return best;
  }

  const IPInstance& ip_;
  std::size_t n_, d_;
  std::int64_t c_pos_ = 1, c_neg_ = 1, c_n_ = 0, c_m_ = 0;
  std::vector<BitSet> col_;  // rows containing item j
  std::vector<BitSet> row_;  // items contained in row i
  BitSet pos_, neg_;
  std::vector<int> group_of_;
  std::size_t n_groups_ = 0;
  std::vector<std::vector<int>> requires_, required_by_;
  std::vector<int> row_group_;
  std::size_t n_prot_ = 0;
};

namespace detail {

struct QueuedNode {
  NodeState state;
  std::int64_t bound = 0;
  std::uint64_t id = 0;
};

struct NodeOrder {
  bool operator()(const QueuedNode& a, const QueuedNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

}  // namespace detail

inline SolveResult solve(const IPInstance& ip, const SolveConfig& cfg = {}) {
  cfg.validate();
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };
  constexpr std::int64_t kInf = SearchSpace::kInf;

  const SearchSpace space(ip);
  const auto& w = ip.weights;

  std::mutex mu;
  std::condition_variable cv;
  std::priority_queue<detail::QueuedNode, std::vector<detail::QueuedNode>, detail::NodeOrder> queue;
  std::multiset<std::int64_t> in_flight;
  std::optional<Candidate> best;
  std::int64_t v_max = kInf;
  std::int64_t v_min_seen = 0;
  std::uint64_t next_id = 0;
  std::size_t nodes = 0;
  bool stop = false;
  StopReason reason = StopReason::Exhausted;
  SolveResult res;
  res.max_penalty = w.max_penalty(ip.d());
  double last_sample = -1.0;

  auto to_d = [&](std::int64_t v) {
    return v >= kInf ? std::numeric_limits<double>::infinity() : w.to_double(v);
  };
  // caller holds the lock
  auto current_v_min = [&] {
    std::int64_t lo = v_max;
    if (!queue.empty()) lo = std::min(lo, queue.top().bound);
    if (!in_flight.empty()) lo = std::min(lo, *in_flight.begin());
    v_min_seen = std::max(v_min_seen, std::min(lo, v_max));
    return v_min_seen;
  };
  auto sample = [&](bool force) {
    const double t = elapsed();
    const std::int64_t lo = current_v_min();
    if (!force && !res.bound_trace.empty()) {
      const auto& last = res.bound_trace.back();
      const bool changed = last.v_max != to_d(v_max) || last.v_min != to_d(lo);
      if (!changed || (last.v_max == to_d(v_max) && t - last_sample < 0.01)) return;
    }
    last_sample = t;
    res.bound_trace.push_back({t, to_d(v_max), to_d(lo), nodes});
  };
  auto offer = [&](Candidate c) {
    if (c.value >= v_max) return false;
    if (cfg.polish) c = space.polish(std::move(c));
    v_max = c.value;
    best = std::move(c);
    return true;
  };

  for (const auto& ws : cfg.warm_starts) {
    std::vector<int> ids = ws.item_ids;
    std::sort(ids.begin(), ids.end());
    if (const auto v = space.evaluate(ids, ws.M)) offer(Candidate{ids, ws.M, *v});
  }
  for (int M = ip.m_min; M <= ip.m_max; ++M) {
    auto r = space.root(M);
    if (!r) continue;
    const auto lb = space.lower_bound(*r);
    if (lb >= kInf) continue;
    if (auto c = space.rounding_pass(*r)) offer(std::move(*c));
    queue.push({std::move(*r), lb, next_id++});
  }
  sample(true);

  auto worker = [&] {
    std::unique_lock lock(mu);
    for (;;) {
      if (stop) return;
      if (queue.empty()) {
        if (in_flight.empty()) {
          stop = true;
          cv.notify_all();
          return;
        }
        cv.wait(lock);
        continue;
      }
      if (elapsed() >= cfg.time_limit) {
        stop = true;
        reason = StopReason::TimeLimit;
        cv.notify_all();
        return;
      }
      if (cfg.node_limit && nodes >= *cfg.node_limit) {
        stop = true;
        reason = StopReason::NodeLimit;
        cv.notify_all();
        return;
      }
      if (cfg.target_gap > 0 && best) {
        const auto lo = current_v_min();
        if (v_max == 0 || 1.0 - static_cast<double>(lo) / static_cast<double>(v_max) <= cfg.target_gap) {
          stop = true;
          reason = StopReason::TargetGap;
          cv.notify_all();
          return;
        }
      }
      detail::QueuedNode node = queue.top();
      queue.pop();
      if (node.bound >= v_max) {
        // best-first: everything left is dominated
        while (!queue.empty()) queue.pop();
        continue;
      }
      ++nodes;
      const auto flight = in_flight.insert(node.bound);
      const std::int64_t cutoff = v_max;
      lock.unlock();

      std::vector<Candidate> found;
      std::vector<detail::QueuedNode> children;
      if (auto c = space.rounding_pass(node.state); c && c->value < cutoff) found.push_back(std::move(*c));
      const int j = space.branch_item(node.state);
      if (j >= 0) {
        for (int side = 0; side < 2; ++side) {
          NodeState child = node.state;
          (side == 0 ? child.in : child.out).set(static_cast<std::size_t>(j));
          if (!space.propagate(child)) continue;
          if (space.is_leaf(child)) {
            std::vector<int> ids;
            child.in.for_each([&](std::size_t k) { ids.push_back(static_cast<int>(k)); });
            if (const auto v = space.evaluate(ids, child.M)) found.push_back(Candidate{ids, child.M, *v});
            continue;
          }
          const auto lb = std::max(node.bound, space.lower_bound(child));
          if (lb >= cutoff) continue;
          children.push_back({std::move(child), lb, 0});
        }
      }

      lock.lock();
      bool improved = false;
      for (auto& c : found) improved = offer(std::move(c)) || improved;
      for (auto& ch : children) {
        if (ch.bound >= v_max) continue;
        ch.id = next_id++;
        queue.push(std::move(ch));
      }
      in_flight.erase(flight);
      sample(improved);
      cv.notify_all();
    }
  };

  const int n_workers = cfg.deterministic ? 1 : std::max(1, cfg.workers);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < n_workers; ++k) pool.emplace_back(worker);
  }

  std::lock_guard lock(mu);
  const bool exhausted = queue.empty() && in_flight.empty() && reason == StopReason::Exhausted;
  res.nodes_explored = nodes;
  res.stop_reason = reason;
  if (best) {
    res.incumbent = make_checklist(ip.data, best->ids, best->M, "mip");
    res.v_max = w.to_double(v_max);
    const std::int64_t lo = exhausted ? v_max : current_v_min();
    v_min_seen = lo;
    res.v_min = w.to_double(lo);
    res.gap = v_max == 0 ? 0.0 : 1.0 - static_cast<double>(lo) / static_cast<double>(v_max);
    res.status = (lo >= v_max) ? SolveStatus::Optimal : SolveStatus::Feasible;
    if (res.status == SolveStatus::Optimal) res.gap = 0.0;
  } else if (exhausted) {
    res.status = SolveStatus::Infeasible;
    res.v_max = res.v_min = std::numeric_limits<double>::infinity();
    res.gap = 0.0;
  } else {
    res.status = SolveStatus::NoSolutionFound;
    std::int64_t lo = queue.empty() ? v_min_seen : std::max(v_min_seen, queue.top().bound);
    res.v_min = w.to_double(lo);
    res.gap = 1.0;
  }
  res.wall_time = elapsed();
  if (res.status != SolveStatus::Infeasible)
    res.bound_trace.push_back({res.wall_time, res.v_max, res.v_min, nodes});
  if (res.incumbent) {
    auto& notes = res.incumbent->provenance.notes;
    notes["status"] = std::string(to_string(res.status));
    notes["gap"] = format_number(res.gap);
    notes["nodes"] = std::to_string(nodes);
  }
  return res;
}

// Compiles and solves in one call.
inline SolveResult solve(const BinaryDataset& data, const ConstraintSet& cons, const SolveConfig& cfg = {}) {
  return solve(compile(data, cons), cfg);
}

}  // namespace checklist
