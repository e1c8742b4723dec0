#pragma once

// End-to-end workflows: method dispatch, cross-validation and fairness audits.

#include <algorithm>
#include <future>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "checklist/baselines.hpp"
#include "checklist/constraints.hpp"
#include "checklist/core.hpp"
#include "checklist/cover.hpp"
#include "checklist/dataset.hpp"
#include "checklist/io.hpp"
#include "checklist/pool.hpp"
#include "checklist/solver.hpp"

namespace checklist {

enum class Method { Mip, Cover, Unit };

inline Method parse_method(std::string_view s) {
  if (s == "mip") return Method::Mip;
  if (s == "cover") return Method::Cover;
  if (s == "unit") return Method::Unit;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(s) + "'");
}

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Mip: return "mip";
    case Method::Cover: return "cover";
    case Method::Unit: return "unit";
  }
  return "unknown";
}

struct TrainConfig {
  Method method = Method::Mip;
  ConstraintSet constraints;
  SolveConfig solve;
  bool cover_warm_start = true;  // seed the solver with the cover sweep
  GreedyConfig greedy;
  UnitConfig unit;
};

struct TrainResult {
  std::optional<Checklist> checklist;  // indexes `data`
  std::optional<SolveResult> solve;
  std::string status;  // solver status, "heuristic" or "infeasible"
  std::string message;
  BinaryDataset data;                 // training data, plus complements added by Unit
  std::set<int> complemented;         // items of the input data negated by Unit
};

inline int effective_n_max(const BinaryDataset& data, const ConstraintSet& cons) {
  return std::min(cons.max_items.value_or(8), static_cast<int>(data.d));
}

// Trains a checklist on `data` with the configured method.
inline TrainResult train(const BinaryDataset& data, const TrainConfig& cfg) {
  TrainResult out;
  out.data = data;
  const auto& cons = cfg.constraints;
  switch (cfg.method) {
    case Method::Mip: {
      IPInstance ip;
      try {
        ip = compile(data, cons);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InfeasibleByConstruction) throw;
        out.status = "infeasible";
        out.message = e.what();
        return out;
      }
      SolveConfig sc = cfg.solve;
      if (cfg.cover_warm_start) {
        SweepConfig sw;
        sw.n_max = ip.n_max;
        sw.one_per_group = cons.one_per_group;
        sw.greedy = cfg.greedy;
        sw.w_minus = cons.w_minus;
        const auto pool = cover_sweep(data, sw);
        for (const auto& e : pool.entries())
          if (check_feasible(e.checklist, data, cons).feasible) {
            sc.warm_starts.push_back(e.checklist);
            break;  // pool is sorted; the best feasible one suffices
          }
      }
      out.solve = solve(ip, sc);
      out.status = std::string(to_string(out.solve->status));
      if (out.solve->incumbent) out.checklist = out.solve->incumbent;
      if (out.solve->status == SolveStatus::Infeasible) out.message = "no checklist satisfies the constraints";
      return out;
    }
    case Method::Cover: {
      SweepConfig sw;
      sw.n_max = effective_n_max(data, cons);
      sw.one_per_group = cons.one_per_group;
      sw.greedy = cfg.greedy;
      sw.w_minus = cons.w_minus;
      const auto pool = cover_sweep(data, sw);
      for (const auto& e : pool.entries())
        if (check_feasible(e.checklist, data, cons).feasible) {
          out.checklist = e.checklist;
          break;
        }
      out.status = out.checklist ? "heuristic" : "infeasible";
      if (!out.checklist) out.message = "no cover candidate satisfies the constraints";
      return out;
    }
    case Method::Unit: {
      UnitConfig uc = cfg.unit;
      uc.n_max = effective_n_max(data, cons);
      uc.w_minus = cons.w_minus;
      auto res = unit_weighting(data, uc);
      ConstraintSet relaxed = cons;
      relaxed.one_per_group = false;  // Unit does not enforce feature groups
      for (const auto& e : res.pool.entries())
        if (check_feasible(e.checklist, res.data, relaxed).feasible) {
          out.checklist = e.checklist;
          break;
        }
      for (std::size_t j = data.d; j < res.data.d; ++j) out.complemented.insert(res.data.items[j].complement_of);
      out.data = std::move(res.data);
      out.status = out.checklist ? "heuristic" : "infeasible";
      if (!out.checklist) out.message = "no unit-weighted checklist satisfies the constraints";
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fairness audit

struct FairnessReport {
  std::vector<std::string> groups;
  std::vector<GroupCounts> counts;
  double max_fpr_gap = 0.0;
  double max_fnr_gap = 0.0;
  std::optional<double> worst_fnr;
  std::optional<double> worst_fpr;
};

inline FairnessReport fairness_audit(const Checklist& c, const BinaryDataset& data) {
  require(data.has_groups(), ErrorCode::MissingGroups, "fairness audit needs group labels");
  const auto r = confusion(c, data);
  FairnessReport f;
  f.groups = r.group_names;
  f.counts = r.per_group;
  std::vector<double> fprs, fnrs;
  for (const auto& g : r.per_group) {
    if (auto v = g.fpr()) fprs.push_back(*v);
    if (auto v = g.fnr()) fnrs.push_back(*v);
  }
  if (!fprs.empty()) {
    const auto [lo, hi] = std::minmax_element(fprs.begin(), fprs.end());
    f.max_fpr_gap = *hi - *lo;
    f.worst_fpr = *hi;
  }
  if (!fnrs.empty()) {
    const auto [lo, hi] = std::minmax_element(fnrs.begin(), fnrs.end());
    f.max_fnr_gap = *hi - *lo;
    f.worst_fnr = *hi;
  }
  return f;
}

inline json fairness_to_json(const FairnessReport& f) {
  json groups = json::array();
  for (std::size_t g = 0; g < f.groups.size(); ++g)
    groups.push_back({{"group", f.groups[g]},
                      {"fn", f.counts[g].fn},
                      {"n_pos", f.counts[g].n_pos},
                      {"fp", f.counts[g].fp},
                      {"n_neg", f.counts[g].n_neg},
                      {"fnr", optional_json(f.counts[g].fnr())},
                      {"fpr", optional_json(f.counts[g].fpr())}});
  return {{"groups", groups},
          {"max_fpr_gap", f.max_fpr_gap},
          {"max_fnr_gap", f.max_fnr_gap},
          {"worst_fnr", optional_json(f.worst_fnr)},
          {"worst_fpr", optional_json(f.worst_fpr)}};
}

// ---------------------------------------------------------------------------
// Cross-validation

enum class BinarizeMethod { None, Fixed, Adaptive };
enum class ComplementMode { None, Thresholds, All };

struct PipelineConfig {
  BinarizeMethod binarize = BinarizeMethod::Adaptive;
  int bins = 5;
  ComplementMode complements = ComplementMode::None;
  bool oversample = true;
  OversampleMode oversample_mode = OversampleMode::Cycle;
  std::uint64_t seed = 0;
  TrainConfig train;
  bool parallel_folds = true;
};

// Adds negations of the selected items to a fitted binarization so held-out
// rows get them too.
inline Binarization with_complements(Binarization b, ComplementMode mode) {
  if (mode == ComplementMode::None) return b;
  std::vector<int> group_of(b.items.size(), -1);
  for (std::size_t t = 0; t < b.groups.size(); ++t)
    for (int j : b.groups[t]) group_of[static_cast<std::size_t>(j)] = static_cast<int>(t);
  const std::size_t d = b.items.size();
  for (std::size_t j = 0; j < d; ++j) {
    const auto& src = b.items[j];
    if (src.is_complement()) continue;
    const bool thr = src.kind == ItemKind::ThresholdGeq || src.kind == ItemKind::ThresholdLeq;
    if (mode == ComplementMode::Thresholds && !thr) continue;
    ItemDef c;
    c.kind = ItemKind::Complement;
    c.source = src.source;
    c.threshold = src.threshold;
    c.category = src.category;
    c.complement_of = static_cast<int>(j);
    c.name = negated_display(src);
    b.items.push_back(c);
    b.groups[static_cast<std::size_t>(group_of[j])].push_back(static_cast<int>(b.items.size()) - 1);
  }
  return b;
}

inline Binarization fit_binarization(const RawTable& table, const PipelineConfig& cfg, Diagnostics* diag = nullptr) {
  Binarization b;
  switch (cfg.binarize) {
    case BinarizeMethod::Fixed: b = fit_fixed(table, diag); break;
    case BinarizeMethod::Adaptive: b = fit_adaptive(table, cfg.bins, diag); break;
    case BinarizeMethod::None: {
      // native binary columns only
      for (auto c : table.feature_columns()) {
        require(table.kinds[c] == ColumnKind::Binary, ErrorCode::InvalidSchema,
                "column '" + table.columns[c] + "' needs binarization");
        b.groups.push_back({static_cast<int>(b.items.size())});
        b.items.push_back(detail::native_item(table.columns[c]));
      }
      break;
    }
  }
  return with_complements(std::move(b), cfg.complements);
}

struct FoldReport {
  int fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::optional<Checklist> checklist;
  std::string status;
  double gap = 1.0;
  std::optional<double> train_error;      // on the (oversampled) training split
  std::optional<double> train_error_raw;  // before oversampling
  ConfusionReport test;
  std::optional<double> test_error;
};

struct Summary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

struct CVReport {
  std::string method;
  ConstraintSet constraints;
  std::vector<FoldReport> folds;
  Summary test_error;
  Summary train_error;
  std::optional<Checklist> final_model;
  std::string final_status;
  double final_gap = 1.0;
  std::optional<double> final_train_error;      // oversampled full data
  std::optional<double> final_train_error_raw;  // full data as given
  std::vector<std::vector<std::size_t>> fold_rows;  // test row indices (into the complete rows)
};

// Stratified assignment: each class is shuffled with `seed`, classes are
// concatenated and rows are dealt round-robin into k folds.
inline std::vector<int> stratified_folds(const std::vector<int>& labels, int k, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
  std::mt19937_64 rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<int> fold(labels.size(), 0);
  std::size_t t = 0;
  for (auto i : pos) fold[i] = static_cast<int>(t++ % static_cast<std::size_t>(k));
  for (auto i : neg) fold[i] = static_cast<int>(t++ % static_cast<std::size_t>(k));
  return fold;
}

namespace detail {

struct FitOutcome {
  TrainResult trained;
  Binarization bin;
  std::optional<double> error;      // on training data used by the solver
  std::optional<double> error_raw;  // on training data before oversampling
};

inline FitOutcome fit_pipeline(const RawTable& train_table, const PipelineConfig& cfg) {
  FitOutcome out;
  out.bin = fit_binarization(train_table, cfg);
  const auto raw = materialize(train_table, out.bin);
  const auto data = cfg.oversample ? oversample_minority(raw, cfg.seed, cfg.oversample_mode) : raw;
  out.trained = train(data, cfg.train);
  if (out.trained.checklist) {
    out.error = confusion(*out.trained.checklist, out.trained.data).error();
    auto raw_aug = out.trained.complemented.empty() ? raw : add_complements(raw, out.trained.complemented);
    out.error_raw = confusion(bind_checklist(*out.trained.checklist, raw_aug), raw_aug).error();
  }
  return out;
}

}  // namespace detail

inline CVReport cross_validate(const RawTable& table, const PipelineConfig& cfg, int k = 5) {
  require(k >= 2, ErrorCode::InvalidArgument, "need at least 2 folds");
  table.validate();
  const auto rows = detail::complete_rows(table);
  require(rows.size() >= static_cast<std::size_t>(k), ErrorCode::TooFewRows,
          std::to_string(rows.size()) + " usable rows for " + std::to_string(k) + " folds");
  const RawTable clean = table.subset(rows);
  const std::size_t lc = clean.label_column();
  std::vector<int> labels(clean.num_rows());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = clean.rows[i][lc] == clean.positive_label ? 1 : -1;
  const auto fold_of = stratified_folds(labels, k, cfg.seed);

  CVReport rep;
  rep.method = std::string(to_string(cfg.train.method));
  rep.constraints = cfg.train.constraints;
  rep.fold_rows.assign(static_cast<std::size_t>(k), {});
  for (std::size_t i = 0; i < fold_of.size(); ++i) rep.fold_rows[static_cast<std::size_t>(fold_of[i])].push_back(i);

  auto run_fold = [&](int f) {
    FoldReport fr;
    fr.fold = f;
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < fold_of.size(); ++i) (fold_of[i] == f ? te : tr).push_back(i);
    const RawTable train_t = clean.subset(tr), test_t = clean.subset(te);
    auto fit = detail::fit_pipeline(train_t, cfg);
    fr.n_train = tr.size();
    fr.n_test = te.size();
    fr.status = fit.trained.status;
    if (fit.trained.solve) fr.gap = fit.trained.solve->gap;
    if (fit.trained.checklist) {
      fr.train_error = fit.error;
      fr.train_error_raw = fit.error_raw;
      auto test = materialize(test_t, fit.bin);
      if (!fit.trained.complemented.empty()) test = add_complements(test, fit.trained.complemented);
      const auto bound = bind_checklist(*fit.trained.checklist, test);
      fr.test = confusion(bound, test);
      fr.test_error = fr.test.error();
      fr.checklist = fit.trained.checklist;
    }
    return fr;
  };

  if (cfg.parallel_folds) {
    std::vector<std::future<FoldReport>> futs;
    for (int f = 0; f < k; ++f) futs.push_back(std::async(std::launch::async, run_fold, f));
    for (auto& fu : futs) rep.folds.push_back(fu.get());
  } else {
    for (int f = 0; f < k; ++f) rep.folds.push_back(run_fold(f));
  }
  std::vector<double> te, tr;
  for (const auto& fr : rep.folds) {
    if (fr.test_error) te.push_back(*fr.test_error);
    if (fr.train_error) tr.push_back(*fr.train_error);
  }
  rep.test_error = summarize(te);
  rep.train_error = summarize(tr);

  auto final_fit = detail::fit_pipeline(clean, cfg);
  rep.final_status = final_fit.trained.status;
  if (final_fit.trained.solve) rep.final_gap = final_fit.trained.solve->gap;
  rep.final_model = final_fit.trained.checklist;
  rep.final_train_error = final_fit.error;
  rep.final_train_error_raw = final_fit.error_raw;
  return rep;
}

inline json summary_json(const Summary& s) { return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}}; }

inline json cv_report_to_json(const CVReport& r, const std::string& target = "") {
  json folds = json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"fold", f.fold},
                     {"n_train", f.n_train},
                     {"n_test", f.n_test},
                     {"status", f.status},
                     {"gap", f.gap},
                     {"train_error", optional_json(f.train_error)},
                     {"train_error_raw", optional_json(f.train_error_raw)},
                     {"test_error", optional_json(f.test_error)},
                     {"test", confusion_to_json(f.test)},
                     {"checklist", f.checklist ? checklist_to_json(*f.checklist, target) : json(nullptr)}});
  }
  return {{"method", r.method},
          {"constraints", constraints_to_json(r.constraints)},
          {"folds", folds},
          {"test_error", summary_json(r.test_error)},
          {"train_error", summary_json(r.train_error)},
          {"final",
           {{"status", r.final_status},
            {"gap", r.final_gap},
            {"train_error", optional_json(r.final_train_error)},
            {"train_error_raw", optional_json(r.final_train_error_raw)},
            {"checklist", r.final_model ? checklist_to_json(*r.final_model, target) : json(nullptr)}}}};
}

}  // namespace checklist
