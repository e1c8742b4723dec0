#pragma once

// Sequential training schedules over (N, M) and over an FNR grid.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "checklist/constraints.hpp"
#include "checklist/core.hpp"
#include "checklist/pool.hpp"
#include "checklist/solver.hpp"

namespace checklist {

struct PathStep {
  int n_max = 0;  // i
  int m_max = 0;  // j
  std::optional<double> fnr_cap;
  std::string status;  // optimal | feasible | infeasible | no_solution_found
  bool restricted = false;
  std::optional<std::size_t> best;  // pool index of the reported best
  double objective = std::numeric_limits<double>::infinity();
  double gap = 1.0;
};

struct PathResult {
  ChecklistPool pool;
  std::vector<PathStep> steps;

  const PathStep* step(int i, int j) const {
    for (const auto& s : steps)
      if (s.n_max == i && s.m_max == j && !s.fnr_cap) return &s;
    return nullptr;
  }
};

struct PathConfig {
  SolveConfig solve;
  std::optional<double> total_time;  // split evenly across instances when set
  bool restrict_search = true;
  bool nest_nm = false;  // FNR path: run the (N, M) path inside each step
  int n_max = 8;         // FNR path with nesting
};

namespace detail {

inline SolveConfig per_instance(const PathConfig& cfg, std::size_t instances) {
  SolveConfig s = cfg.solve;
  if (cfg.total_time && instances > 0) s.time_limit = std::max(1e-3, *cfg.total_time / static_cast<double>(instances));
  return s;
}

// Pooled checklists that are feasible for `cons`, best first.
inline std::vector<Checklist> warm_starts_for(const ChecklistPool& pool, const BinaryDataset& data,
                                              const ConstraintSet& cons, int n_max, int m_max) {
  const PoolEntry* best = nullptr;
  for (const auto& e : pool.entries()) {
    if (e.N() > n_max || e.M() > m_max) continue;
    if (!check_feasible(e.checklist, data, cons).feasible) continue;
    if (!best || e.objective < best->objective) best = &e;
  }
  if (!best) return {};
  return {best->checklist};
}

}  // namespace detail

// (N, M) path: instances (N <= i, M <= j) for i in 1..N_max, j in 1..i, each
// warm-started from the best pooled checklist that fits.
inline PathResult path_nm(const BinaryDataset& data, const ConstraintSet& cons, int n_max, const PathConfig& cfg = {},
                          const ChecklistPool* seed_pool = nullptr) {
  require(n_max >= 1, ErrorCode::InvalidArgument, "N_max must be >= 1");
  PathResult out{ChecklistPool(cons.w_minus), {}};
  if (seed_pool) out.pool.merge(*seed_pool, data);
  const auto solve_cfg = detail::per_instance(cfg, static_cast<std::size_t>(n_max * (n_max + 1) / 2));

  for (int i = 1; i <= n_max; ++i) {
    for (int j = 1; j <= i; ++j) {
      PathStep step;
      step.n_max = i;
      step.m_max = j;
      ConstraintSet c = cons;
      c.max_items = std::min(cons.max_items.value_or(i), i);
      c.m_max = std::min(cons.m_max.value_or(j), j);

      const PathStep* ref = i > 1 ? out.step(i - 1, std::min(j, i - 1)) : nullptr;
      const bool restrict = cfg.restrict_search && ref && ref->status == "optimal";
      if (restrict) {
        c.min_items = std::max(cons.min_items.value_or(1), i);
        step.restricted = true;
      }
      auto sc = solve_cfg;
      sc.warm_starts = detail::warm_starts_for(out.pool, data, c, i, j);

      std::optional<SolveResult> res;
      try {
        res = solve(compile(data, c), sc);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InfeasibleByConstruction) throw;
      }
      double obj = std::numeric_limits<double>::infinity();
      std::string status = res ? std::string(to_string(res->status)) : "infeasible";
      if (res && res->incumbent) {
        step.best = out.pool.add(*res->incumbent, data, status, "N<=" + std::to_string(i) + ",M<=" + std::to_string(j));
        obj = out.pool.entries()[*step.best].objective;
        step.gap = res->gap;
      } else if (res && res->status == SolveStatus::Infeasible) {
        step.gap = 0.0;
      }
      if (restrict) {
        // the excluded region N < i was solved to optimality by the reference instance
        if (ref->best && ref->objective < obj) {
          step.best = ref->best;
          obj = ref->objective;
        }
        if (status == "infeasible") status = ref->status;
        step.gap = status == "optimal" ? 0.0 : step.gap;
      }
      step.status = status;
      step.objective = obj;
      out.steps.push_back(step);
    }
  }
  return out;
}

// FNR grid {eps, 2 eps, ..., fnr_max} (fnr_max appended when off-grid).
inline std::vector<double> fnr_grid(double fnr_max, double grid_eps) {
  require(grid_eps > 0 && grid_eps <= fnr_max + 1e-12 && fnr_max <= 1, ErrorCode::InvalidArgument,
          "need 0 < grid_eps <= fnr_max <= 1");
  std::vector<double> caps;
  const int k_max = static_cast<int>(std::floor(fnr_max / grid_eps + 1e-9));
  for (int k = 1; k <= k_max; ++k) caps.push_back(k * grid_eps);
  if (caps.empty() || fnr_max - caps.back() > 1e-9) caps.push_back(fnr_max);
  return caps;
}

// FNR path: minimize false positives (W- = n-) under l+ <= ceil(cap n+)
// for a growing FNR cap, warm-starting from pooled checklists within the cap.
inline PathResult path_fnr(const BinaryDataset& data, const ConstraintSet& cons, double fnr_max, double grid_eps,
                           const PathConfig& cfg = {}) {
  const auto caps = fnr_grid(fnr_max, grid_eps);
  const double w_minus = static_cast<double>(std::max<std::size_t>(1, data.n_neg()));
  PathResult out{ChecklistPool(w_minus), {}};
  std::size_t instances = caps.size();
  if (cfg.nest_nm) instances *= static_cast<std::size_t>(cfg.n_max * (cfg.n_max + 1) / 2);
  auto solve_cfg = detail::per_instance(cfg, instances);

  for (double cap : caps) {
    PathStep step;
    step.fnr_cap = cap;
    ConstraintSet c = cons;
    c.fnr_cap = cap;
    c.w_minus = w_minus;
    const int n_cap = std::min(cons.max_items.value_or(static_cast<int>(data.d)), static_cast<int>(data.d));
    step.n_max = n_cap;
    step.m_max = std::min(cons.m_max.value_or(n_cap), n_cap);
    const std::string tag = "fnr<=" + format_number(cap);

    if (cfg.nest_nm) {
      PathConfig inner = cfg;
      inner.total_time.reset();
      inner.solve = solve_cfg;
      const auto sub = path_nm(data, c, std::min(cfg.n_max, n_cap), inner, &out.pool);
      for (const auto& e : sub.pool.entries()) out.pool.add(e.checklist, data, e.status, tag);
      const auto& last = sub.steps.back();
      step.status = last.status;
      step.gap = last.gap;
      if (last.best) {
        const auto& e = sub.pool.entries()[*last.best];
        step.best = out.pool.add(e.checklist, data, e.status, tag);
        step.objective = out.pool.entries()[*step.best].objective;
      }
    } else {
      auto sc = solve_cfg;
      for (const auto& e : out.pool.entries())
        if (e.fnr().value_or(0.0) <= cap + 1e-12 && check_feasible(e.checklist, data, c).feasible)
          sc.warm_starts.push_back(e.checklist);
      // only the best pooled candidate is needed
      if (sc.warm_starts.size() > 1) {
        const auto* b = out.pool.best([&](const PoolEntry& e) {
          return e.fnr().value_or(0.0) <= cap + 1e-12 && check_feasible(e.checklist, data, c).feasible;
        });
        sc.warm_starts = {b->checklist};
      }
      std::optional<SolveResult> res;
      try {
        res = solve(compile(data, c), sc);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InfeasibleByConstruction) throw;
      }
      step.status = res ? std::string(to_string(res->status)) : "infeasible";
      if (res && res->incumbent) {
        step.best = out.pool.add(*res->incumbent, data, step.status, tag);
        step.objective = out.pool.entries()[*step.best].objective;
        step.gap = res->gap;
      } else {
        step.gap = step.status == "infeasible" ? 0.0 : 1.0;
      }
    }
    if (step.best) out.pool.entries()[*step.best].fnr_cap = cap;
    out.steps.push_back(step);
  }
  return out;
}

// CSV frontier: one line per path step.
inline void write_frontier_csv(std::ostream& os, const PathResult& path) {
  os << "N,M,fnr_cap,train_fnr,train_fpr,objective,gap,status\n";
  for (const auto& s : path.steps) {
    const PoolEntry* e = s.best ? &path.pool.entries()[*s.best] : nullptr;
    auto opt = [](std::optional<double> v) { return v ? format_number(*v) : std::string(); };
    os << (e ? std::to_string(e->N()) : "") << "," << (e ? std::to_string(e->M()) : "") << ","
       << opt(s.fnr_cap) << "," << (e ? opt(e->fnr()) : "") << "," << (e ? opt(e->fpr()) : "") << ","
       << (e ? format_number(e->objective) : "") << "," << format_number(s.gap) << "," << s.status << "\n";
  }
}

}  // namespace checklist
