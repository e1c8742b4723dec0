// checklist: command-line front end for training, evaluating and rendering
// predictive checklists.
//
// Exit codes: 0 success, 2 infeasible, 3 time limit without a solution,
// 1 any other error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "checklist/checklist.hpp"

using namespace checklist;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;
constexpr int kNoSolution = 3;

constexpr const char* kFormats = R"(File formats
  schema JSON      {"columns": {"<name>": "continuous|ordinal|categorical|binary|label|group|ignore"},
                    "positive_label": "<value>"}
  items JSON       {"items": [{"name", "source", "kind", "threshold", "category", "complement_of", "group"}]}
  binarized CSV    one 0/1 column per item, then "label" (1 or -1), optionally "group"
  constraints JSON keys: max_items, min_items, m_min, m_max, one_per_group, implications,
                   force_positive, fnr_cap, fpr_cap, group_fnr_caps, group_fpr_gap,
                   group_fnr_gap, w_minus
  model JSON       {"items": [...], "M", "N", "provenance", "target", "training_stats"}
)";

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_text(path, text);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

RawTable load_table(const std::string& input, const std::string& schema) {
  return make_table(load_csv(input), schema_from_json(load_json(schema)));
}

ComplementMode parse_complements(const std::string& s) {
  if (s == "none") return ComplementMode::None;
  if (s == "thresholds") return ComplementMode::Thresholds;
  if (s == "all") return ComplementMode::All;
  throw Error(ErrorCode::InvalidArgument, "unknown complement mode '" + s + "'");
}

BinarizeMethod parse_binarize(const std::string& s) {
  if (s == "none") return BinarizeMethod::None;
  if (s == "fixed") return BinarizeMethod::Fixed;
  if (s == "adaptive") return BinarizeMethod::Adaptive;
  throw Error(ErrorCode::InvalidArgument, "unknown binarization '" + s + "'");
}

// Binarized data plus the manifest it came with, if any.
struct LoadedData {
  BinaryDataset data;
  std::optional<Binarization> manifest;
};

LoadedData load_binarized(const std::string& data_path, const std::string& items_path, const std::string& group_col,
                          bool allow_unlabelled = false) {
  auto csv = load_csv(data_path);
  if (allow_unlabelled && std::find(csv.header.begin(), csv.header.end(), "label") == csv.header.end()) {
    csv.header.push_back("label");
    for (auto& r : csv.rows) r.push_back("1");
  }
  LoadedData out;
  if (!items_path.empty()) out.manifest = binarization_from_manifest(load_json(items_path));
  out.data = read_binarized_csv(csv, out.manifest ? &*out.manifest : nullptr, group_col);
  return out;
}

// Appends complement columns for the chosen items of a loaded dataset.
BinaryDataset apply_complements(const BinaryDataset& data, ComplementMode mode) {
  if (mode == ComplementMode::None) return data;
  std::set<int> ids;
  for (std::size_t j = 0; j < data.d; ++j) {
    const auto& it = data.items[j];
    if (it.is_complement()) continue;
    const bool thr = it.kind == ItemKind::ThresholdGeq || it.kind == ItemKind::ThresholdLeq;
    if (mode == ComplementMode::Thresholds && !thr) continue;
    ids.insert(static_cast<int>(j));
  }
  return add_complements(data, ids);
}

int workers_from_env(int fallback) {
  if (const char* s = std::getenv("CHECKLIST_THREADS")) {
    try {
      const int w = std::stoi(s);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring CHECKLIST_THREADS='" << s << "'\n";
  }
  return fallback;
}

// Flags shared by train, path and crossval.
struct TrainFlags {
  std::string constraints;
  std::string method = "mip";
  double time_limit = 60.0;
  int workers = 1;
  bool deterministic = false;
  std::string warm_start = "cover";
  std::string complements = "none";
  std::string target;
  bool timing = false;

  void add(CLI::App* app, bool with_method = true) {
    app->add_option("--constraints", constraints, "constraint set JSON")->check(CLI::ExistingFile);
    if (with_method)
      app->add_option("--method", method, "training method")
          ->check(CLI::IsMember({"mip", "cover", "unit"}))
          ->capture_default_str();
    app->add_option("--time-limit", time_limit, "solver time limit in seconds")->capture_default_str();
    app->add_option("--workers", workers, "solver threads (CHECKLIST_THREADS overrides)")->capture_default_str();
    app->add_flag("--deterministic", deterministic, "single-threaded, reproducible search");
    app->add_option("--warm-start", warm_start, "cover, none, or a model JSON to seed the solver")
        ->capture_default_str();
    app->add_option("--complements", complements, "add negated items")
        ->check(CLI::IsMember({"none", "thresholds", "all"}))
        ->capture_default_str();
    app->add_option("--target", target, "outcome name used in reports and cards");
    app->add_flag("--timing", timing, "include wall time and bound trace in reports");
  }

  ConstraintSet constraint_set() const {
    return constraints.empty() ? ConstraintSet{} : constraints_from_json(load_json(constraints));
  }

  SolveConfig solve_config() const {
    SolveConfig s;
    s.time_limit = time_limit;
    s.workers = workers_from_env(workers);
    s.deterministic = deterministic;
    return s;
  }

  TrainConfig train_config(const BinaryDataset* data) const {
    TrainConfig t;
    t.method = parse_method(method);
    t.constraints = constraint_set();
    t.solve = solve_config();
    t.cover_warm_start = warm_start == "cover";
    if (warm_start != "cover" && warm_start != "none") {
      require(data != nullptr, ErrorCode::InvalidArgument, "--warm-start with a model file needs --data");
      t.solve.warm_starts.push_back(bind_checklist(checklist_from_json(load_json(warm_start)), *data));
    }
    return t;
  }
};

int exit_for_status(const std::string& status) {
  if (status == "infeasible") return kInfeasible;
  if (status == "no_solution_found") return kNoSolution;
  return kOk;
}

// --- subcommands -----------------------------------------------------------

struct BinarizeCmd {
  std::string input, schema, method = "adaptive", complements = "none", out_items, out_data;
  int bins = 5;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("binarize", "fit item definitions and write a binarized dataset");
    c->add_option("--input", input, "raw CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--schema", schema, "schema JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--method", method)->check(CLI::IsMember({"fixed", "adaptive"}))->capture_default_str();
    c->add_option("--bins", bins, "quantile bins for adaptive")->capture_default_str();
    c->add_option("--complements", complements)
        ->check(CLI::IsMember({"none", "thresholds", "all"}))
        ->capture_default_str();
    c->add_option("--out-items", out_items, "item manifest JSON")->required();
    c->add_option("--out-data", out_data, "binarized CSV")->required();
    c->callback([this] { code = run(); });
  }

  int run() {
    const auto table = load_table(input, schema);
    PipelineConfig cfg;
    cfg.binarize = parse_binarize(method);
    cfg.bins = bins;
    cfg.complements = parse_complements(complements);
    Diagnostics diag;
    const auto bin = fit_binarization(table, cfg, &diag);
    const auto data = materialize(table, bin, &diag);
    for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";
    write_text(out_items, dump(items_manifest(bin.items, bin.groups)));
    std::ostringstream os;
    write_binarized_csv(os, data);
    write_text(out_data, os.str());
    std::cerr << data.n << " rows, " << data.d << " items\n";
    return kOk;
  }

  int code = kOk;
};

struct TrainCmd {
  std::string data, items, out_model, out_report, group_col = "group";
  bool oversample = false;
  TrainFlags flags;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("train", "train one checklist on binarized data");
    c->add_option("--data", data, "binarized CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--items", items, "item manifest JSON")->check(CLI::ExistingFile);
    c->add_option("--group-column", group_col)->capture_default_str();
    c->add_flag("--oversample", oversample, "duplicate minority rows until classes balance");
    c->add_option("--out-model", out_model, "model JSON (default stdout)");
    c->add_option("--out-report", out_report, "solve report JSON");
    flags.add(c);
    c->callback([this] { code = run(); });
  }

  int run() {
    auto loaded = load_binarized(data, items, group_col);
    auto ds = apply_complements(loaded.data, parse_complements(flags.complements));
    if (oversample) ds = oversample_minority(ds);
    const auto cfg = flags.train_config(&ds);
    const auto r = train(ds, cfg);

    json report{{"method", flags.method}, {"status", r.status}, {"constraints", constraints_to_json(cfg.constraints)}};
    if (!r.message.empty()) report["message"] = r.message;
    if (r.solve) report["solve"] = solve_result_to_json(*r.solve, flags.timing);
    if (r.checklist) {
      const auto stats = confusion(*r.checklist, r.data);
      report["training"] = confusion_to_json(stats);
      auto model = checklist_to_json(*r.checklist, flags.target, stats);
      if (r.solve) model["gap"] = r.solve->gap;
      emit(out_model, dump(model));
    } else {
      std::cerr << r.status << ": " << r.message << "\n";
      if (r.status == "infeasible") explain_infeasible(ds, cfg.constraints, report);
    }
    if (!out_report.empty()) write_text(out_report, dump(report));
    return exit_for_status(r.status);
  }

  // Lists the constraints broken by the best unconstrained cover candidate.
  static void explain_infeasible(const BinaryDataset& ds, const ConstraintSet& cons, json& report) {
    SweepConfig sw;
    sw.n_max = effective_n_max(ds, cons);
    sw.w_minus = cons.w_minus;
    const auto pool = cover_sweep(ds, sw);
    json why = json::array();
    if (!pool.empty()) {
      for (const auto& v : check_feasible(pool.entries().front().checklist, ds, cons).violations) {
        why.push_back({{"constraint", v.constraint}, {"detail", v.detail}, {"margin", v.margin}});
        std::cerr << "  " << v.constraint << ": " << v.detail << "\n";
      }
    }
    report["violations"] = why;
  }

  int code = kOk;
};

struct PathCmd {
  std::string data, items, mode = "nm", out_pool, out_frontier, group_col = "group";
  int n_max = 8;
  double fnr_max = 0.2, grid_eps = 0.05;
  std::optional<double> total_time;
  bool no_restrict = false, nest = false;
  TrainFlags flags;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("path", "trace the (N, M) or FNR path of optimal checklists");
    c->add_option("--data", data, "binarized CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--items", items, "item manifest JSON")->check(CLI::ExistingFile);
    c->add_option("--group-column", group_col)->capture_default_str();
    c->add_option("--mode", mode)->check(CLI::IsMember({"nm", "fnr"}))->capture_default_str();
    c->add_option("--n-max", n_max)->capture_default_str();
    c->add_option("--fnr-max", fnr_max)->capture_default_str();
    c->add_option("--grid-eps", grid_eps)->capture_default_str();
    c->add_option("--total-time", total_time, "time budget split across path instances");
    c->add_flag("--no-restrict", no_restrict, "do not restrict the (N, M) path to N >= i");
    c->add_flag("--nest", nest, "run the (N, M) path inside each FNR step");
    c->add_option("--out-pool", out_pool, "pool JSON (default stdout)");
    c->add_option("--out-frontier", out_frontier, "frontier CSV");
    flags.add(c, false);
    c->callback([this] { code = run(); });
  }

  int run() {
    auto loaded = load_binarized(data, items, group_col);
    const auto ds = apply_complements(loaded.data, parse_complements(flags.complements));
    auto cons = flags.constraint_set();
    PathConfig cfg;
    cfg.solve = flags.solve_config();
    cfg.total_time = total_time;
    cfg.restrict_search = !no_restrict;
    cfg.nest_nm = nest;
    cfg.n_max = n_max;
    PathResult r;
    if (mode == "nm") {
      r = path_nm(ds, cons, n_max, cfg);
    } else {
      if (!cons.max_items) cons.max_items = n_max;
      r = path_fnr(ds, cons, fnr_max, grid_eps, cfg);
    }
    json steps = json::array();
    bool any = false, all_infeasible = true;
    for (const auto& s : r.steps) {
      steps.push_back({{"n_max", s.n_max},
                       {"m_max", s.m_max},
                       {"fnr_cap", optional_json(s.fnr_cap)},
                       {"status", s.status},
                       {"restricted", s.restricted},
                       {"best", s.best ? json(*s.best) : json(nullptr)},
                       {"objective", number_json(s.objective)},
                       {"gap", s.gap}});
      any = any || s.best.has_value();
      all_infeasible = all_infeasible && s.status == "infeasible";
    }
    emit(out_pool, dump({{"mode", mode}, {"steps", steps}, {"pool", pool_to_json(r.pool, flags.target)}}));
    if (!out_frontier.empty()) {
      std::ostringstream os;
      write_frontier_csv(os, r);
      write_text(out_frontier, os.str());
    }
    if (any) return kOk;
    return all_infeasible ? kInfeasible : kNoSolution;
  }

  int code = kOk;
};

struct PredictCmd {
  std::string model, data, items, out;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("predict", "score rows with a saved model");
    c->add_option("--model", model, "model JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--data", data, "binarized CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--items", items, "item manifest JSON")->check(CLI::ExistingFile);
    c->add_option("--out", out, "predictions CSV (default stdout)");
    c->callback([this] { code = run(); });
  }

  int run() {
    const auto loaded = load_binarized(data, items, "group", true);
    const auto c = bind_checklist(checklist_from_json(load_json(model)), loaded.data);
    std::ostringstream os;
    os << "row,score,prediction\n";
    for (std::size_t i = 0; i < loaded.data.n; ++i)
      os << i << "," << score(c, loaded.data.row(i)) << "," << predict(c, loaded.data.row(i)) << "\n";
    emit(out, os.str());
    return kOk;
  }

  int code = kOk;
};

struct EvaluateCmd {
  std::string model, data, items, groups, out;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("evaluate", "error rates and per-group audit of a saved model");
    c->add_option("--model", model, "model JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--data", data, "binarized CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--items", items, "item manifest JSON")->check(CLI::ExistingFile);
    c->add_option("--groups", groups, "group column for the fairness audit");
    c->add_option("--out", out, "report JSON (default stdout)");
    c->callback([this] { code = run(); });
  }

  int run() {
    const auto loaded = load_binarized(data, items, groups.empty() ? "group" : groups);
    const auto c = bind_checklist(checklist_from_json(load_json(model)), loaded.data);
    json j = confusion_to_json(confusion(c, loaded.data));
    j["objective"] = objective(c, loaded.data);
    if (!groups.empty()) j["fairness"] = fairness_to_json(fairness_audit(c, loaded.data));
    emit(out, dump(j));
    return kOk;
  }

  int code = kOk;
};

struct CrossvalCmd {
  std::string input, schema, binarize = "adaptive", out;
  int folds = 5, bins = 5;
  std::uint64_t seed = 0;
  bool no_oversample = false, serial = false;
  TrainFlags flags;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("crossval", "k-fold cross-validation of the full pipeline on raw data");
    c->add_option("--input", input, "raw CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--schema", schema, "schema JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--folds", folds)->capture_default_str();
    c->add_option("--seed", seed)->capture_default_str();
    c->add_option("--binarize", binarize)->check(CLI::IsMember({"none", "fixed", "adaptive"}))->capture_default_str();
    c->add_option("--bins", bins)->capture_default_str();
    c->add_flag("--no-oversample", no_oversample, "train on the raw class balance");
    c->add_flag("--serial", serial, "run folds one after another");
    c->add_option("--out", out, "CV report JSON (default stdout)");
    flags.add(c);
    c->callback([this] { code = run(); });
  }

  int run() {
    require(flags.warm_start == "cover" || flags.warm_start == "none", ErrorCode::InvalidArgument,
            "crossval accepts --warm-start cover or none");
    const auto table = load_table(input, schema);
    PipelineConfig cfg;
    cfg.binarize = parse_binarize(binarize);
    cfg.bins = bins;
    cfg.complements = parse_complements(flags.complements);
    cfg.oversample = !no_oversample;
    cfg.seed = seed;
    cfg.train = flags.train_config(nullptr);
    cfg.parallel_folds = !serial;
    const auto rep = cross_validate(table, cfg, folds);
    emit(out, dump(cv_report_to_json(rep, flags.target)));
    std::cerr << "test error mean " << rep.test_error.mean << " (min " << rep.test_error.min << ", max "
              << rep.test_error.max << ")\n";
    return rep.final_model ? kOk : exit_for_status(rep.final_status);
  }

  int code = kOk;
};

struct RenderCmd {
  std::string model, target;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("render", "print a model as a checklist card");
    c->add_option("--model", model, "model JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--target", target, "outcome name (default: the model's target)");
    c->callback([this] { code = run(); });
  }

  int run() {
    const auto j = load_json(model);
    const auto c = checklist_from_json(j);
    std::cout << render_card(c, target.empty() ? j.value("target", std::string()) : target);
    return kOk;
  }

  int code = kOk;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn and apply predictive checklists (M-of-N rules)", "checklist"};
  app.require_subcommand(1);
  app.footer(kFormats);

  BinarizeCmd binarize;
  TrainCmd train_cmd;
  PathCmd path;
  PredictCmd predict_cmd;
  EvaluateCmd evaluate;
  CrossvalCmd crossval;
  RenderCmd render;
  binarize.add(app);
  train_cmd.add(app);
  path.add(app);
  predict_cmd.add(app);
  evaluate.add(app);
  crossval.add(app);
  render.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << kFormats;
    return kError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  for (int code : {binarize.code, train_cmd.code, path.code, predict_cmd.code, evaluate.code, crossval.code,
                   render.code})
    if (code != kOk) return code;
  return kOk;
}
