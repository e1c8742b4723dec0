#pragma once

// JSON / CSV formats for schemas, item manifests, binarized data, models,
// constraint sets, pools and solve reports; plus the text card renderer.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "checklist/constraints.hpp"
#include "checklist/core.hpp"
#include "checklist/dataset.hpp"
#include "checklist/error.hpp"
#include "checklist/pool.hpp"
#include "checklist/solver.hpp"

namespace checklist {

using json = nlohmann::json;

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "cannot write '" + path + "'");
  out << text;
  require(out.good(), ErrorCode::IoError, "write to '" + path + "' failed");
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, what + ": " + e.what());
  }
}

inline json load_json(const std::string& path) { return parse_json(read_text(path), path); }

inline CsvData load_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  return read_csv(in);
}

// Doubles print with round-trip precision; NaN becomes null.
inline json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json optional_json(const std::optional<double>& v) { return v ? number_json(*v) : json(nullptr); }

// ---------------------------------------------------------------------------
// Schema: {"columns": {name: kind}, "positive_label": "..."}

inline Schema schema_from_json(const json& j) {
  require(j.is_object() && j.contains("columns") && j["columns"].is_object(), ErrorCode::InvalidSchema,
          "schema needs a 'columns' object");
  Schema s;
  for (const auto& [name, kind] : j["columns"].items()) {
    require(kind.is_string(), ErrorCode::InvalidSchema, "column kind for '" + name + "' must be a string");
    try {
      s.kinds[name] = parse_column_kind(kind.get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidSchema, e.what());
    }
  }
  require(j.contains("positive_label"), ErrorCode::InvalidSchema, "schema needs 'positive_label'");
  const auto& p = j["positive_label"];
  s.positive_label = p.is_string() ? p.get<std::string>() : p.dump();
  return s;
}

inline json schema_to_json(const Schema& s) {
  json cols = json::object();
  for (const auto& [name, kind] : s.kinds) cols[name] = std::string(to_string(kind));
  return {{"columns", cols}, {"positive_label", s.positive_label}};
}

// ---------------------------------------------------------------------------
// Items

inline json item_to_json(const ItemDef& it) {
  json j{{"name", it.name}, {"source", it.source}, {"kind", std::string(to_string(it.kind))}};
  if (std::isfinite(it.threshold)) j["threshold"] = it.threshold;
  if (!it.category.empty()) j["category"] = it.category;
  if (it.is_complement()) j["complement_of"] = it.complement_of;
  return j;
}

inline ItemDef item_from_json(const json& j) {
  ItemDef it;
  try {
    it.name = j.at("name").get<std::string>();
    it.source = j.value("source", it.name);
    it.kind = parse_item_kind(j.value("kind", std::string("native-binary")));
    if (j.contains("threshold") && !j["threshold"].is_null()) it.threshold = j["threshold"].get<double>();
    it.category = j.value("category", std::string());
    it.complement_of = j.value("complement_of", -1);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad item entry: ") + e.what());
  }
  return it;
}

// Manifest: {"items": [{name, source, kind, threshold, category, group}]}
inline json items_manifest(const std::vector<ItemDef>& items, const std::vector<std::vector<int>>& groups) {
  std::vector<int> group_of(items.size(), -1);
  for (std::size_t t = 0; t < groups.size(); ++t)
    for (int j : groups[t]) group_of[static_cast<std::size_t>(j)] = static_cast<int>(t);
  json arr = json::array();
  for (std::size_t j = 0; j < items.size(); ++j) {
    auto e = item_to_json(items[j]);
    e["group"] = group_of[j];
    arr.push_back(e);
  }
  return {{"items", arr}};
}

inline Binarization binarization_from_manifest(const json& j) {
  require(j.is_object() && j.contains("items") && j["items"].is_array(), ErrorCode::ParseError,
          "item manifest needs an 'items' array");
  Binarization b;
  std::map<int, std::vector<int>> groups;
  int next_free = 1 << 20;
  for (const auto& e : j["items"]) {
    b.items.push_back(item_from_json(e));
    const int idx = static_cast<int>(b.items.size()) - 1;
    const int g = e.contains("group") && e["group"].is_number_integer() ? e["group"].get<int>() : next_free++;
    groups[g].push_back(idx);
  }
  for (auto& [g, members] : groups) b.groups.push_back(std::move(members));
  return b;
}

// ---------------------------------------------------------------------------
// Binarized CSV: one 0/1 column per item, then "label" (+1/-1) and an optional group column.

inline void write_binarized_csv(std::ostream& os, const BinaryDataset& data) {
  for (std::size_t j = 0; j < data.d; ++j) os << csv_escape(data.items[j].name) << ",";
  os << "label";
  if (data.has_groups()) os << ",group";
  os << "\n";
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.d; ++j) os << static_cast<int>(data.at(i, j)) << ",";
    os << data.y[i];
    if (data.has_groups()) os << "," << csv_escape(data.group_names[static_cast<std::size_t>(data.group_labels[i])]);
    os << "\n";
  }
}

// Reads a binarized CSV. With a manifest, item columns are matched by name
// and group structure comes from the manifest; without one every column other
// than label/group is a native item in its own group.
inline BinaryDataset read_binarized_csv(const CsvData& csv, const Binarization* manifest = nullptr,
                                        const std::string& group_column = "group") {
  auto col = [&](const std::string& name) -> int {
    auto it = std::find(csv.header.begin(), csv.header.end(), name);
    return it == csv.header.end() ? -1 : static_cast<int>(it - csv.header.begin());
  };
  const int lc = col("label");
  require(lc >= 0, ErrorCode::InvalidSchema, "binarized CSV needs a 'label' column");
  const int gc = col(group_column);

  BinaryDataset ds;
  std::vector<int> src;
  if (manifest) {
    ds.items = manifest->items;
    ds.feature_groups = manifest->groups;
    for (const auto& it : ds.items) {
      const int c = col(it.name);
      require(c >= 0, ErrorCode::UnknownItem, "item column '" + it.name + "' missing from data");
      src.push_back(c);
    }
  } else {
    for (std::size_t c = 0; c < csv.header.size(); ++c) {
      if (static_cast<int>(c) == lc || static_cast<int>(c) == gc) continue;
      ItemDef it;
      it.name = it.source = csv.header[c];
      ds.feature_groups.push_back({static_cast<int>(ds.items.size())});
      ds.items.push_back(it);
      src.push_back(static_cast<int>(c));
    }
  }
  ds.d = ds.items.size();
  ds.n = csv.rows.size();
  ds.x.assign(ds.n * ds.d, 0);
  ds.y.resize(ds.n);
  std::map<std::string, int> gid;
  std::vector<std::string> gkey(ds.n);
  for (std::size_t i = 0; i < ds.n; ++i) {
    const auto& row = csv.rows[i];
    require(row.size() == csv.header.size(), ErrorCode::ParseError, "ragged row " + std::to_string(i + 1));
    for (std::size_t j = 0; j < ds.d; ++j) {
      const auto& cell = row[static_cast<std::size_t>(src[j])];
      require(cell == "0" || cell == "1", ErrorCode::NonBinaryColumn,
              "item column '" + ds.items[j].name + "' has non-binary value '" + cell + "'");
      ds.x[i * ds.d + j] = cell == "1";
    }
    const auto& lab = row[static_cast<std::size_t>(lc)];
    require(lab == "1" || lab == "-1" || lab == "+1", ErrorCode::ParseError, "label must be 1 or -1, got '" + lab + "'");
    ds.y[i] = lab == "-1" ? -1 : 1;
    if (gc >= 0) {
      gkey[i] = row[static_cast<std::size_t>(gc)];
      gid.emplace(gkey[i], 0);
    }
  }
  if (gc >= 0 && ds.n > 0) {
    int next = 0;
    for (auto& [k, id] : gid) {
      id = next++;
      ds.group_names.push_back(k);
    }
    ds.group_labels.resize(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) ds.group_labels[i] = gid[gkey[i]];
  }
  ds.weights.assign(ds.n, 1.0);
  ds.validate();
  return ds;
}

// ---------------------------------------------------------------------------
// Models

inline std::string item_direction(const ItemDef& it) {
  switch (it.kind) {
    case ItemKind::ThresholdGeq: return ">=";
    case ItemKind::ThresholdLeq: return "<=";
    case ItemKind::CategoryEquals: return "=";
    case ItemKind::CategoryNotEquals: return "!=";
    case ItemKind::NativeBinary: return "is";
    case ItemKind::Complement: return "not";
  }
  return "";
}

inline json checklist_to_json(const Checklist& c, const std::string& target = "",
                              const std::optional<ConfusionReport>& stats = std::nullopt) {
  json items = json::array();
  for (std::size_t k = 0; k < c.item_ids.size(); ++k) {
    json e;
    if (k < c.item_defs.size()) e = item_to_json(c.item_defs[k]);
    else e = {{"name", k < c.item_names.size() ? c.item_names[k] : "x" + std::to_string(c.item_ids[k])}};
    if (k < c.item_defs.size()) e["direction"] = item_direction(c.item_defs[k]);
    e["index"] = c.item_ids[k];
    items.push_back(e);
  }
  json notes = json::object();
  for (const auto& [k, v] : c.provenance.notes) notes[k] = v;
  json j{{"items", items},
         {"M", c.M},
         {"N", c.N()},
         {"provenance", {{"method", c.provenance.method}, {"notes", notes}}},
         {"target", target}};
  if (stats) {
    j["training_stats"] = {{"fn", stats->fn},   {"fp", stats->fp},   {"n_pos", stats->n_pos},
                           {"n_neg", stats->n_neg}, {"error", optional_json(stats->error())},
                           {"fnr", optional_json(stats->fnr())}, {"fpr", optional_json(stats->fpr())}};
  } else {
    j["training_stats"] = json::object();
  }
  return j;
}

inline Checklist checklist_from_json(const json& j) {
  try {
    Checklist c;
    c.M = j.at("M").get<int>();
    for (const auto& e : j.at("items")) {
      c.item_defs.push_back(item_from_json(e));
      c.item_names.push_back(c.item_defs.back().name);
      c.item_ids.push_back(e.value("index", static_cast<int>(c.item_ids.size())));
    }
    if (j.contains("provenance")) {
      c.provenance.method = j["provenance"].value("method", std::string("mip"));
      if (j["provenance"].contains("notes"))
        for (const auto& [k, v] : j["provenance"]["notes"].items())
          c.provenance.notes[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    require(c.M >= 1 && c.M <= c.N(), ErrorCode::InvalidArgument, "model threshold outside [1, N]");
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad model JSON: ") + e.what());
  }
}

// Re-indexes a model's items against `data` by item name.
inline Checklist bind_checklist(const Checklist& model, const BinaryDataset& data) {
  std::vector<int> ids;
  for (const auto& name : model.item_names) {
    const int j = data.find_item(name);
    require(j >= 0, ErrorCode::UnknownItem, "model item '" + name + "' not present in data");
    ids.push_back(j);
  }
  auto c = make_checklist(data, ids, model.M, model.provenance.method);
  c.provenance = model.provenance;
  return c;
}

// ---------------------------------------------------------------------------
// Constraint sets

inline json item_ref_json(const ItemRef& r) {
  if (const int* i = std::get_if<int>(&r)) return *i;
  return std::get<std::string>(r);
}

inline ItemRef item_ref_from_json(const json& j) {
  if (j.is_number_integer()) return j.get<int>();
  require(j.is_string(), ErrorCode::ParseError, "item reference must be an index or a name");
  return j.get<std::string>();
}

inline ConstraintSet constraints_from_json(const json& j) {
  require(j.is_object(), ErrorCode::ParseError, "constraint set must be a JSON object");
  static const std::set<std::string> known{"max_items",     "min_items",      "m_min",         "m_max",
                                           "one_per_group", "implications",   "force_positive", "fnr_cap",
                                           "fpr_cap",       "group_fnr_caps", "group_fpr_gap", "group_fnr_gap",
                                           "w_minus"};
  for (const auto& [k, v] : j.items())
    require(known.count(k) > 0, ErrorCode::ParseError, "unknown constraint key '" + k + "'");
  ConstraintSet c;
  try {
    auto opt_int = [&](const char* k, std::optional<int>& dst) {
      if (j.contains(k) && !j[k].is_null()) dst = j[k].get<int>();
    };
    auto opt_dbl = [&](const char* k, std::optional<double>& dst) {
      if (j.contains(k) && !j[k].is_null()) dst = j[k].get<double>();
    };
    opt_int("max_items", c.max_items);
    opt_int("min_items", c.min_items);
    opt_int("m_min", c.m_min);
    opt_int("m_max", c.m_max);
    c.one_per_group = j.value("one_per_group", false);
    if (j.contains("implications"))
      for (const auto& p : j["implications"]) {
        require(p.is_array() && p.size() == 2, ErrorCode::ParseError, "implication must be a pair [a, b]");
        c.implications.emplace_back(item_ref_from_json(p[0]), item_ref_from_json(p[1]));
      }
    if (j.contains("force_positive"))
      for (const auto& p : j["force_positive"]) {
        std::vector<ItemRef> pred;
        if (p.is_array())
          for (const auto& r : p) pred.push_back(item_ref_from_json(r));
        else
          pred.push_back(item_ref_from_json(p));
        c.force_positive.push_back(std::move(pred));
      }
    opt_dbl("fnr_cap", c.fnr_cap);
    opt_dbl("fpr_cap", c.fpr_cap);
    if (j.contains("group_fnr_caps"))
      for (const auto& [g, v] : j["group_fnr_caps"].items()) c.group_fnr_caps[g] = v.get<double>();
    opt_dbl("group_fpr_gap", c.group_fpr_gap);
    opt_dbl("group_fnr_gap", c.group_fnr_gap);
    c.w_minus = j.value("w_minus", 1.0);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad constraint set: ") + e.what());
  }
  c.validate();
  return c;
}

inline json constraints_to_json(const ConstraintSet& c) {
  json j = json::object();
  if (c.max_items) j["max_items"] = *c.max_items;
  if (c.min_items) j["min_items"] = *c.min_items;
  if (c.m_min) j["m_min"] = *c.m_min;
  if (c.m_max) j["m_max"] = *c.m_max;
  if (c.one_per_group) j["one_per_group"] = true;
  if (!c.implications.empty()) {
    json a = json::array();
    for (const auto& [x, y] : c.implications) a.push_back({item_ref_json(x), item_ref_json(y)});
    j["implications"] = a;
  }
  if (!c.force_positive.empty()) {
    json a = json::array();
    for (const auto& p : c.force_positive) {
      json q = json::array();
      for (const auto& r : p) q.push_back(item_ref_json(r));
      a.push_back(q);
    }
    j["force_positive"] = a;
  }
  if (c.fnr_cap) j["fnr_cap"] = *c.fnr_cap;
  if (c.fpr_cap) j["fpr_cap"] = *c.fpr_cap;
  if (!c.group_fnr_caps.empty()) j["group_fnr_caps"] = c.group_fnr_caps;
  if (c.group_fpr_gap) j["group_fpr_gap"] = *c.group_fpr_gap;
  if (c.group_fnr_gap) j["group_fnr_gap"] = *c.group_fnr_gap;
  if (c.w_minus != 1.0) j["w_minus"] = c.w_minus;
  return j;
}

// ---------------------------------------------------------------------------
// Reports

inline json confusion_to_json(const ConfusionReport& r) {
  json j{{"fn", r.fn},
         {"fp", r.fp},
         {"n_pos", r.n_pos},
         {"n_neg", r.n_neg},
         {"error", optional_json(r.error())},
         {"fnr", optional_json(r.fnr())},
         {"fpr", optional_json(r.fpr())}};
  if (!r.per_group.empty()) {
    json groups = json::array();
    for (std::size_t g = 0; g < r.per_group.size(); ++g) {
      const auto& gc = r.per_group[g];
      groups.push_back({{"group", r.group_names[g]},
                        {"fn", gc.fn},
                        {"n_pos", gc.n_pos},
                        {"fp", gc.fp},
                        {"n_neg", gc.n_neg},
                        {"fnr", optional_json(gc.fnr())},
                        {"fpr", optional_json(gc.fpr())}});
    }
    j["groups"] = groups;
  }
  return j;
}

// Deterministic fields only unless `timing` is set.
inline json solve_result_to_json(const SolveResult& r, bool timing = false) {
  json j{{"status", std::string(to_string(r.status))},
         {"stop_reason", std::string(to_string(r.stop_reason))},
         {"v_max", number_json(r.v_max)},
         {"v_min", number_json(r.v_min)},
         {"gap", r.gap},
         {"nodes_explored", r.nodes_explored}};
  if (timing) {
    j["wall_time"] = r.wall_time;
    json trace = json::array();
    for (const auto& s : r.bound_trace) trace.push_back({s.time, number_json(s.v_max), number_json(s.v_min), s.nodes});
    j["bound_trace"] = trace;
  }
  return j;
}

inline json pool_to_json(const ChecklistPool& pool, const std::string& target = "") {
  json arr = json::array();
  for (const auto& e : pool.entries()) {
    json m = json::object();
    for (const auto& [k, v] : e.meta) m[k] = v;
    arr.push_back({{"checklist", checklist_to_json(e.checklist, target, e.report)},
                   {"objective", e.objective},
                   {"status", e.status},
                   {"tag", e.tag},
                   {"gap", e.gap},
                   {"fnr_cap", optional_json(e.fnr_cap)},
                   {"meta", m}});
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Card rendering

inline std::string render_card(const Checklist& c, const std::string& target) {
  std::vector<std::string> lines;
  for (std::size_t k = 0; k < c.item_ids.size(); ++k) {
    if (k < c.item_defs.size()) lines.push_back(item_display(c.item_defs[k]));
    else if (k < c.item_names.size()) lines.push_back(c.item_names[k]);
    else lines.push_back("x" + std::to_string(c.item_ids[k]));
  }
  const std::string header = "Predict " + (target.empty() ? std::string("outcome") : target) + " if " +
                             std::to_string(c.M) + "+ items are checked";
  std::size_t width = header.size();
  for (const auto& l : lines) width = std::max(width, l.size() + 6);
  const std::string rule = "+" + std::string(width + 2, '-') + "+\n";
  std::ostringstream os;
  os << rule;
  os << "| " << header << std::string(width - header.size(), ' ') << " |\n";
  os << rule;
  for (const auto& l : lines) os << "| " << l << std::string(width - l.size() - 3, ' ') << "[ ]" << " |\n";
  os << rule;
  return os.str();
}

}  // namespace checklist
