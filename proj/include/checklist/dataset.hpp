#pragma once

// Tabular ingestion and binarization into candidate checklist items.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "checklist/error.hpp"

namespace checklist {

enum class ColumnKind { Continuous, Ordinal, Categorical, Binary, Label, Group, Ignore };

inline std::string_view to_string(ColumnKind k) {
  switch (k) {
    case ColumnKind::Continuous: return "continuous";
    case ColumnKind::Ordinal: return "ordinal";
    case ColumnKind::Categorical: return "categorical";
    case ColumnKind::Binary: return "binary";
    case ColumnKind::Label: return "label";
    case ColumnKind::Group: return "group";
    case ColumnKind::Ignore: return "ignore";
  }
  return "ignore";
}

inline ColumnKind parse_column_kind(std::string_view s) {
  if (s == "continuous") return ColumnKind::Continuous;
  if (s == "ordinal") return ColumnKind::Ordinal;
  if (s == "categorical") return ColumnKind::Categorical;
  if (s == "binary") return ColumnKind::Binary;
  if (s == "label") return ColumnKind::Label;
  if (s == "group") return ColumnKind::Group;
  if (s == "ignore") return ColumnKind::Ignore;
  throw Error(ErrorCode::InvalidSchema, "unknown column kind '" + std::string(s) + "'");
}

inline bool is_missing(std::string_view cell) {
  return cell.empty() || cell == "?" || cell == "NA" || cell == "NaN" || cell == "nan" ||
         cell == "null";
}

inline std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Shortest round-trip decimal form, so item names are stable and unique.
inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// CSV

struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180 style: comma separated, double-quoted fields may contain commas,
// newlines and doubled quotes.
inline CsvData read_csv(std::istream& in) {
  CsvData out;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool header_done = false;
  std::size_t line = 1;

  auto end_record = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
    if (record.size() == 1 && record[0].empty()) {
      record.clear();
      return;
    }
    for (auto& f : record)
      if (!f.empty() && f.back() == '\r') f.pop_back();
    if (!header_done) {
      out.header = std::move(record);
      header_done = true;
    } else {
      require(record.size() == out.header.size(), ErrorCode::ParseError,
              "line " + std::to_string(line) + ": expected " + std::to_string(out.header.size()) +
                  " fields, got " + std::to_string(record.size()));
      out.rows.push_back(std::move(record));
    }
    record.clear();
  };

  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(field);
      field.clear();
      field_started = false;
    } else if (c == '\n') {
      end_record();
      ++line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  require(!in_quotes, ErrorCode::ParseError, "unterminated quoted field");
  if (!field.empty() || !record.empty()) end_record();
  require(header_done, ErrorCode::ParseError, "empty CSV input");
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

// ---------------------------------------------------------------------------
// Raw table

struct Schema {
  std::map<std::string, ColumnKind> kinds;  // columns absent here are ignored
  std::string positive_label;
};

struct RawTable {
  std::vector<std::string> columns;
  std::vector<ColumnKind> kinds;
  std::vector<std::vector<std::string>> rows;
  std::string positive_label;

  std::size_t num_rows() const { return rows.size(); }

  std::size_t label_column() const {
    for (std::size_t c = 0; c < kinds.size(); ++c)
      if (kinds[c] == ColumnKind::Label) return c;
    throw Error(ErrorCode::InvalidSchema, "no label column");
  }

  std::vector<std::size_t> group_columns() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < kinds.size(); ++c)
      if (kinds[c] == ColumnKind::Group) out.push_back(c);
    return out;
  }

  std::vector<std::size_t> feature_columns() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < kinds.size(); ++c) {
      const auto k = kinds[c];
      if (k == ColumnKind::Continuous || k == ColumnKind::Ordinal ||
          k == ColumnKind::Categorical || k == ColumnKind::Binary)
        out.push_back(c);
    }
    return out;
  }

  void validate() const {
    require(columns.size() == kinds.size(), ErrorCode::InvalidSchema, "columns/kinds size mismatch");
    std::size_t labels = 0;
    for (auto k : kinds) labels += (k == ColumnKind::Label);
    require(labels == 1, ErrorCode::InvalidSchema,
            "exactly one label column required, found " + std::to_string(labels));
    require(!positive_label.empty(), ErrorCode::InvalidSchema, "positive label value not declared");
    const std::size_t lc = label_column();
    std::set<std::string> values;
    for (const auto& r : rows) {
      require(r.size() == columns.size(), ErrorCode::InvalidSchema, "ragged row");
      if (!is_missing(r[lc])) values.insert(r[lc]);
    }
    require(values.size() <= 2, ErrorCode::InvalidSchema,
            "label column '" + columns[lc] + "' has more than two distinct values");
  }

  RawTable subset(std::span<const std::size_t> idx) const {
    RawTable t;
    t.columns = columns;
    t.kinds = kinds;
    t.positive_label = positive_label;
    t.rows.reserve(idx.size());
    for (auto i : idx) t.rows.push_back(rows.at(i));
    return t;
  }
};

inline RawTable make_table(const CsvData& csv, const Schema& schema) {
  RawTable t;
  t.columns = csv.header;
  t.kinds.assign(csv.header.size(), ColumnKind::Ignore);
  for (const auto& [name, kind] : schema.kinds) {
    auto it = std::find(csv.header.begin(), csv.header.end(), name);
    require(it != csv.header.end(), ErrorCode::InvalidSchema,
            "schema column '" + name + "' not found in CSV header");
    t.kinds[static_cast<std::size_t>(it - csv.header.begin())] = kind;
  }
  t.rows = csv.rows;
  t.positive_label = schema.positive_label;
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------
// Items

enum class ItemKind { ThresholdGeq, ThresholdLeq, CategoryEquals, CategoryNotEquals, NativeBinary, Complement };

inline std::string_view to_string(ItemKind k) {
  switch (k) {
    case ItemKind::ThresholdGeq: return "threshold-geq";
    case ItemKind::ThresholdLeq: return "threshold-leq";
    case ItemKind::CategoryEquals: return "category-equals";
    case ItemKind::CategoryNotEquals: return "category-not-equals";
    case ItemKind::NativeBinary: return "native-binary";
    case ItemKind::Complement: return "complement";
  }
  return "native-binary";
}

inline ItemKind parse_item_kind(std::string_view s) {
  if (s == "threshold-geq") return ItemKind::ThresholdGeq;
  if (s == "threshold-leq") return ItemKind::ThresholdLeq;
  if (s == "category-equals") return ItemKind::CategoryEquals;
  if (s == "category-not-equals") return ItemKind::CategoryNotEquals;
  if (s == "native-binary") return ItemKind::NativeBinary;
  if (s == "complement") return ItemKind::Complement;
  throw Error(ErrorCode::ParseError, "unknown item kind '" + std::string(s) + "'");
}

struct ItemDef {
  std::string name;
  std::string source;  // source column name
  ItemKind kind = ItemKind::NativeBinary;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  std::string category;
  int complement_of = -1;  // index of the negated item when kind == Complement

  bool is_complement() const { return kind == ItemKind::Complement; }
  bool operator==(const ItemDef&) const = default;
};

inline std::string item_display(const ItemDef& item) {
  switch (item.kind) {
    case ItemKind::ThresholdGeq: return item.source + " >= " + format_number(item.threshold);
    case ItemKind::ThresholdLeq: return item.source + " <= " + format_number(item.threshold);
    case ItemKind::CategoryEquals: return item.source + " = " + item.category;
    case ItemKind::CategoryNotEquals: return item.source + " != " + item.category;
    case ItemKind::NativeBinary: return item.source;
    case ItemKind::Complement: return item.name;
  }
  return item.name;
}

// Display text of the logical negation of an item.
inline std::string negated_display(const ItemDef& item) {
  switch (item.kind) {
    case ItemKind::ThresholdGeq: return item.source + " < " + format_number(item.threshold);
    case ItemKind::ThresholdLeq: return item.source + " > " + format_number(item.threshold);
    case ItemKind::CategoryEquals: return item.source + " != " + item.category;
    case ItemKind::CategoryNotEquals: return item.source + " = " + item.category;
    case ItemKind::NativeBinary: return "not " + item.source;
    case ItemKind::Complement: return "not (" + item.name + ")";
  }
  return "not " + item.name;
}

// ---------------------------------------------------------------------------
// Binary dataset

struct BinaryDataset {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::uint8_t> x;  // row-major n x d, entries in {0,1}
  std::vector<int> y;           // +1 / -1
  std::vector<ItemDef> items;
  std::vector<std::vector<int>> feature_groups;  // partition of item indices
  std::vector<int> group_labels;                 // protected group id per row, empty if none
  std::vector<std::string> group_names;
  std::vector<double> weights;
  std::string label_name = "label";

  std::uint8_t at(std::size_t i, std::size_t j) const { return x[i * d + j]; }
  std::span<const std::uint8_t> row(std::size_t i) const { return {x.data() + i * d, d}; }

  std::size_t n_pos() const {
    return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  }
  std::size_t n_neg() const { return n - n_pos(); }
  bool has_groups() const { return !group_labels.empty(); }

  // Feature-group id of each item.
  std::vector<int> item_group() const {
    std::vector<int> g(d, -1);
    for (std::size_t t = 0; t < feature_groups.size(); ++t)
      for (int j : feature_groups[t]) g[static_cast<std::size_t>(j)] = static_cast<int>(t);
    return g;
  }

  int find_item(std::string_view name) const {
    for (std::size_t j = 0; j < items.size(); ++j)
      if (items[j].name == name) return static_cast<int>(j);
    return -1;
  }

  int find_group(std::string_view name) const {
    for (std::size_t g = 0; g < group_names.size(); ++g)
      if (group_names[g] == name) return static_cast<int>(g);
    return -1;
  }

  void validate() const {
    require(x.size() == n * d, ErrorCode::InvalidArgument, "X has wrong size");
    require(y.size() == n, ErrorCode::InvalidArgument, "y has wrong size");
    require(items.size() == d, ErrorCode::InvalidArgument, "item list has wrong size");
    require(weights.empty() || weights.size() == n, ErrorCode::InvalidArgument, "weights have wrong size");
    for (auto v : x) require(v <= 1, ErrorCode::InvalidArgument, "X entries must be 0/1");
    for (int v : y) require(v == 1 || v == -1, ErrorCode::InvalidArgument, "labels must be +1/-1");
    std::vector<int> seen(d, 0);
    for (const auto& g : feature_groups)
      for (int j : g) {
        require(j >= 0 && static_cast<std::size_t>(j) < d, ErrorCode::InvalidArgument,
                "feature group references unknown item");
        ++seen[static_cast<std::size_t>(j)];
      }
    for (std::size_t j = 0; j < d; ++j)
      require(seen[j] == 1, ErrorCode::InvalidArgument,
              "item " + std::to_string(j) + " must belong to exactly one feature group");
    std::set<std::string> names;
    for (std::size_t j = 0; j < d; ++j) {
      const auto& it = items[j];
      require(names.insert(it.name).second, ErrorCode::InvalidArgument, "duplicate item name '" + it.name + "'");
      if (it.is_complement()) {
        require(it.complement_of >= 0 && static_cast<std::size_t>(it.complement_of) < d &&
                    !items[static_cast<std::size_t>(it.complement_of)].is_complement(),
                ErrorCode::InvalidArgument, "complement item '" + it.name + "' has an invalid source");
      }
    }
    if (!group_labels.empty()) {
      require(group_labels.size() == n, ErrorCode::InvalidArgument, "group labels have wrong size");
      for (int g : group_labels)
        require(g >= 0 && static_cast<std::size_t>(g) < group_names.size(), ErrorCode::InvalidArgument,
                "group label out of range");
    }
  }
};

// Builds a dataset from dense rows; items get names x0..x{d-1} and singleton groups.
inline BinaryDataset make_dataset(const std::vector<std::vector<int>>& rows, const std::vector<int>& labels,
                                  const std::vector<int>& groups = {}) {
  BinaryDataset ds;
  ds.n = rows.size();
  ds.d = rows.empty() ? 0 : rows.front().size();
  ds.x.reserve(ds.n * ds.d);
  for (const auto& r : rows) {
    require(r.size() == ds.d, ErrorCode::InvalidArgument, "ragged rows");
    for (int v : r) ds.x.push_back(static_cast<std::uint8_t>(v));
  }
  ds.y = labels;
  for (std::size_t j = 0; j < ds.d; ++j) {
    ItemDef it;
    it.name = "x" + std::to_string(j);
    it.source = it.name;
    it.kind = ItemKind::NativeBinary;
    ds.items.push_back(it);
    ds.feature_groups.push_back({static_cast<int>(j)});
  }
  if (!groups.empty()) {
    ds.group_labels = groups;
    const int mx = *std::max_element(groups.begin(), groups.end());
    for (int g = 0; g <= mx; ++g) ds.group_names.push_back("g" + std::to_string(g));
  }
  ds.weights.assign(ds.n, 1.0);
  ds.validate();
  return ds;
}

// ---------------------------------------------------------------------------
// Binarization

struct Diagnostics {
  std::vector<std::string> warnings;
  std::size_t dropped_rows = 0;
};

// Fitted item definitions; reusable on held-out rows.
struct Binarization {
  std::vector<ItemDef> items;
  std::vector<std::vector<int>> groups;
};

namespace detail {

inline std::vector<std::size_t> complete_rows(const RawTable& t) {
  std::vector<std::size_t> used = t.feature_columns();
  used.push_back(t.label_column());
  for (auto g : t.group_columns()) used.push_back(g);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    bool ok = true;
    for (auto c : used)
      if (is_missing(t.rows[i][c])) {
        ok = false;
        break;
      }
    if (ok) out.push_back(i);
  }
  return out;
}

inline std::vector<double> numeric_values(const RawTable& t, std::size_t col, std::span<const std::size_t> rows) {
  std::vector<double> v;
  v.reserve(rows.size());
  for (auto i : rows) {
    auto num = parse_number(t.rows[i][col]);
    require(num.has_value(), ErrorCode::NonNumericContinuous,
            "column '" + t.columns[col] + "' has non-numeric value '" + t.rows[i][col] + "'");
    v.push_back(*num);
  }
  return v;
}

inline void check_binary_column(const RawTable& t, std::size_t col, std::span<const std::size_t> rows) {
  for (auto i : rows) {
    auto num = parse_number(t.rows[i][col]);
    require(num && (*num == 0.0 || *num == 1.0), ErrorCode::NonBinaryColumn,
            "column '" + t.columns[col] + "' has non-binary value '" + t.rows[i][col] + "'");
  }
}

inline void require_nonempty_column(const RawTable& t, std::size_t col) {
  for (const auto& r : t.rows)
    if (!is_missing(r[col])) return;
  throw Error(ErrorCode::EmptyColumn, "column '" + t.columns[col] + "' has no non-missing values");
}

inline ItemDef threshold_item(const std::string& source, double v) {
  ItemDef it;
  it.source = source;
  it.kind = ItemKind::ThresholdGeq;
  it.threshold = v;
  it.name = item_display(it);
  return it;
}

inline ItemDef category_item(const std::string& source, const std::string& cat) {
  ItemDef it;
  it.source = source;
  it.kind = ItemKind::CategoryEquals;
  it.category = cat;
  it.name = item_display(it);
  return it;
}

inline ItemDef native_item(const std::string& source) {
  ItemDef it;
  it.source = source;
  it.kind = ItemKind::NativeBinary;
  it.name = source;
  return it;
}

inline std::size_t report_dropped(const RawTable& t, std::size_t kept, Diagnostics* diag) {
  const std::size_t dropped = t.rows.size() - kept;
  if (diag && dropped > 0) {
    diag->dropped_rows += dropped;
    diag->warnings.push_back("dropped " + std::to_string(dropped) + " row(s) with missing values");
  }
  return dropped;
}

}  // namespace detail

// Lower median: the value at 1-based rank ceil(n/2) of the sorted values.
inline double lower_median(std::vector<double> values) {
  require(!values.empty(), ErrorCode::EmptyColumn, "median of empty column");
  std::sort(values.begin(), values.end());
  const std::size_t rank = (values.size() + 1) / 2;
  return values[rank - 1];
}

// Thresholds at quantiles q = k/bins: the sorted value at index ceil(q n),
// deduplicated. A threshold equal to the column minimum would give a
// constant item and is dropped. Thresholds always land on observed values.
inline std::vector<double> quantile_thresholds(std::vector<double> values, int bins) {
  require(bins >= 2, ErrorCode::InvalidArgument, "bins must be >= 2");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> out;
  if (n == 0) return out;
  for (int k = 1; k < bins; ++k) {
    const std::size_t target = (static_cast<std::size_t>(k) * n + static_cast<std::size_t>(bins) - 1) /
                               static_cast<std::size_t>(bins);
    if (target >= n) break;
    const double v = values[target];
    if (v == values.front()) continue;
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  return out;
}

inline Binarization fit_fixed(const RawTable& table, Diagnostics* diag = nullptr) {
  table.validate();
  const auto rows = detail::complete_rows(table);
  Binarization b;
  for (auto c : table.feature_columns()) {
    detail::require_nonempty_column(table, c);
    const auto& name = table.columns[c];
    switch (table.kinds[c]) {
      case ColumnKind::Continuous:
      case ColumnKind::Ordinal: {
        auto vals = detail::numeric_values(table, c, rows);
        if (vals.empty()) {
          if (diag) diag->warnings.push_back("column '" + name + "' has no complete rows; no item");
          break;
        }
        b.groups.push_back({static_cast<int>(b.items.size())});
        b.items.push_back(detail::threshold_item(name, lower_median(std::move(vals))));
        break;
      }
      case ColumnKind::Categorical: {
        std::map<std::string, std::size_t> counts;
        for (auto i : rows) ++counts[table.rows[i][c]];
        if (counts.empty()) break;
        // most common category; ties go to the lexicographically smallest
        auto best = counts.begin();
        for (auto it = counts.begin(); it != counts.end(); ++it)
          if (it->second > best->second) best = it;
        b.groups.push_back({static_cast<int>(b.items.size())});
        b.items.push_back(detail::category_item(name, best->first));
        break;
      }
      case ColumnKind::Binary: {
        detail::check_binary_column(table, c, rows);
        b.groups.push_back({static_cast<int>(b.items.size())});
        b.items.push_back(detail::native_item(name));
        break;
      }
      default: break;
    }
  }
  return b;
}

inline Binarization fit_adaptive(const RawTable& table, int bins, Diagnostics* diag = nullptr) {
  require(bins >= 2, ErrorCode::InvalidArgument, "bins must be >= 2");
  table.validate();
  const auto rows = detail::complete_rows(table);
  Binarization b;
  for (auto c : table.feature_columns()) {
    detail::require_nonempty_column(table, c);
    const auto& name = table.columns[c];
    std::vector<int> group;
    switch (table.kinds[c]) {
      case ColumnKind::Continuous:
      case ColumnKind::Ordinal: {
        auto vals = detail::numeric_values(table, c, rows);
        for (double v : quantile_thresholds(std::move(vals), bins)) {
          group.push_back(static_cast<int>(b.items.size()));
          b.items.push_back(detail::threshold_item(name, v));
        }
        break;
      }
      case ColumnKind::Categorical: {
        std::set<std::string> cats;
        for (auto i : rows) cats.insert(table.rows[i][c]);
        for (const auto& cat : cats) {
          group.push_back(static_cast<int>(b.items.size()));
          b.items.push_back(detail::category_item(name, cat));
        }
        break;
      }
      case ColumnKind::Binary: {
        detail::check_binary_column(table, c, rows);
        group.push_back(static_cast<int>(b.items.size()));
        b.items.push_back(detail::native_item(name));
        break;
      }
      default: break;
    }
    if (group.empty()) {
      if (diag) diag->warnings.push_back("column '" + name + "' is degenerate; no items emitted");
    } else {
      b.groups.push_back(std::move(group));
    }
  }
  return b;
}

// Evaluates fitted items on a table. Rows with a missing value in any feature,
// label or group column are dropped.
inline BinaryDataset materialize(const RawTable& table, const Binarization& bin, Diagnostics* diag = nullptr) {
  table.validate();
  const auto rows = detail::complete_rows(table);
  detail::report_dropped(table, rows.size(), diag);

  BinaryDataset ds;
  ds.n = rows.size();
  ds.d = bin.items.size();
  ds.items = bin.items;
  ds.feature_groups = bin.groups;
  ds.x.assign(ds.n * ds.d, 0);
  const std::size_t lc = table.label_column();
  ds.label_name = table.columns[lc];

  std::map<std::string, std::size_t> col_index;
  for (std::size_t c = 0; c < table.columns.size(); ++c) col_index[table.columns[c]] = c;

  for (std::size_t j = 0; j < ds.d; ++j) {
    const auto& it = bin.items[j];
    if (it.is_complement()) continue;
    auto ci = col_index.find(it.source);
    require(ci != col_index.end(), ErrorCode::UnknownItem,
            "item '" + it.name + "' references missing column '" + it.source + "'");
    const std::size_t c = ci->second;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& cell = table.rows[rows[r]][c];
      bool v = false;
      switch (it.kind) {
        case ItemKind::ThresholdGeq:
        case ItemKind::ThresholdLeq:
        case ItemKind::NativeBinary: {
          auto num = parse_number(cell);
          require(num.has_value(), ErrorCode::NonNumericContinuous,
                  "column '" + it.source + "' has non-numeric value '" + cell + "'");
          if (it.kind == ItemKind::ThresholdGeq) v = *num >= it.threshold;
          else if (it.kind == ItemKind::ThresholdLeq) v = *num <= it.threshold;
          else {
            require(*num == 0.0 || *num == 1.0, ErrorCode::NonBinaryColumn,
                    "column '" + it.source + "' has non-binary value '" + cell + "'");
            v = *num == 1.0;
          }
          break;
        }
        case ItemKind::CategoryEquals: v = cell == it.category; break;
        case ItemKind::CategoryNotEquals: v = cell != it.category; break;
        case ItemKind::Complement: break;
      }
      ds.x[r * ds.d + j] = v ? 1 : 0;
    }
  }
  for (std::size_t j = 0; j < ds.d; ++j) {
    const auto& it = bin.items[j];
    if (!it.is_complement()) continue;
    require(it.complement_of >= 0 && static_cast<std::size_t>(it.complement_of) < ds.d, ErrorCode::UnknownItem,
            "complement item '" + it.name + "' has no source");
    const auto src = static_cast<std::size_t>(it.complement_of);
    for (std::size_t r = 0; r < ds.n; ++r) ds.x[r * ds.d + j] = 1 - ds.x[r * ds.d + src];
  }

  ds.y.resize(ds.n);
  for (std::size_t r = 0; r < rows.size(); ++r)
    ds.y[r] = table.rows[rows[r]][lc] == table.positive_label ? 1 : -1;

  const auto gcols = table.group_columns();
  if (!gcols.empty()) {
    std::map<std::string, int> ids;
    std::vector<std::string> keys(ds.n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::string key;
      for (std::size_t k = 0; k < gcols.size(); ++k) {
        if (k) key += "|";
        key += table.rows[rows[r]][gcols[k]];
      }
      keys[r] = key;
      ids.emplace(key, 0);
    }
    int next = 0;
    for (auto& [key, id] : ids) {
      id = next++;
      ds.group_names.push_back(key);
    }
    ds.group_labels.resize(ds.n);
    for (std::size_t r = 0; r < ds.n; ++r) ds.group_labels[r] = ids[keys[r]];
  }
  ds.weights.assign(ds.n, 1.0);
  ds.validate();
  return ds;
}

inline BinaryDataset binarize_fixed(const RawTable& table, Diagnostics* diag = nullptr) {
  return materialize(table, fit_fixed(table, diag), diag);
}

inline BinaryDataset binarize_adaptive(const RawTable& table, int bins, Diagnostics* diag = nullptr) {
  return materialize(table, fit_adaptive(table, bins, diag), diag);
}

// ---------------------------------------------------------------------------
// Complements and oversampling

// Appends the negation of each listed item to the same feature group. Items
// whose complement already exists are skipped.
inline BinaryDataset add_complements(const BinaryDataset& data, const std::set<int>& item_ids) {
  for (int j : item_ids) {
    require(j >= 0 && static_cast<std::size_t>(j) < data.d, ErrorCode::UnknownItem,
            "item " + std::to_string(j) + " does not exist");
    require(!data.items[static_cast<std::size_t>(j)].is_complement(), ErrorCode::DoubleComplement,
            "item '" + data.items[static_cast<std::size_t>(j)].name + "' is already a complement");
  }
  std::vector<int> existing(data.d, -1);
  for (std::size_t j = 0; j < data.d; ++j)
    if (data.items[j].is_complement()) existing[static_cast<std::size_t>(data.items[j].complement_of)] = static_cast<int>(j);

  std::vector<int> to_add;
  for (int j : item_ids)
    if (existing[static_cast<std::size_t>(j)] < 0) to_add.push_back(j);

  BinaryDataset out = data;
  const std::size_t d_new = data.d + to_add.size();
  out.d = d_new;
  out.x.assign(data.n * d_new, 0);
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.d; ++j) out.x[i * d_new + j] = data.at(i, j);
    for (std::size_t k = 0; k < to_add.size(); ++k)
      out.x[i * d_new + data.d + k] = 1 - data.at(i, static_cast<std::size_t>(to_add[k]));
  }
  const auto item_group = data.item_group();
  for (std::size_t k = 0; k < to_add.size(); ++k) {
    const auto& src = data.items[static_cast<std::size_t>(to_add[k])];
    ItemDef c;
    c.kind = ItemKind::Complement;
    c.source = src.source;
    c.threshold = src.threshold;
    c.category = src.category;
    c.complement_of = to_add[k];
    c.name = negated_display(src);
    out.items.push_back(c);
    out.feature_groups[static_cast<std::size_t>(item_group[static_cast<std::size_t>(to_add[k])])].push_back(
        static_cast<int>(data.d + k));
  }
  out.validate();
  return out;
}

enum class OversampleMode { Cycle, Shuffled };

// Duplicates minority-class rows until both classes have equal counts.
// Cycle mode walks the minority rows in index order; Shuffled mode walks a
// seeded permutation of them.
inline BinaryDataset oversample_minority(const BinaryDataset& data, std::uint64_t seed = 0,
                                         OversampleMode mode = OversampleMode::Cycle) {
  const std::size_t np = data.n_pos();
  const std::size_t nn = data.n_neg();
  require(np >= 1 && nn >= 1, ErrorCode::OneClassOnly, "oversampling requires both classes");
  if (np == nn) return data;
  const int minority = np < nn ? 1 : -1;
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < data.n; ++i)
    if (data.y[i] == minority) pool.push_back(i);
  if (mode == OversampleMode::Shuffled) {
    std::mt19937_64 rng(seed);
    std::shuffle(pool.begin(), pool.end(), rng);
  }
  const std::size_t extra = (np < nn ? nn - np : np - nn);
  BinaryDataset out = data;
  out.n = data.n + extra;
  out.x.reserve(out.n * out.d);
  for (std::size_t k = 0; k < extra; ++k) {
    const std::size_t i = pool[k % pool.size()];
    auto r = data.row(i);
    out.x.insert(out.x.end(), r.begin(), r.end());
    out.y.push_back(data.y[i]);
    if (!data.group_labels.empty()) out.group_labels.push_back(data.group_labels[i]);
    out.weights.push_back(data.weights.empty() ? 1.0 : data.weights[i]);
  }
  if (data.weights.empty()) out.weights.assign(out.n, 1.0);
  return out;
}

inline BinaryDataset select_rows(const BinaryDataset& data, std::span<const std::size_t> idx) {
  BinaryDataset out = data;
  out.n = idx.size();
  out.x.clear();
  out.y.clear();
  out.group_labels.clear();
  out.weights.clear();
  for (auto i : idx) {
    auto r = data.row(i);
    out.x.insert(out.x.end(), r.begin(), r.end());
    out.y.push_back(data.y[i]);
    if (!data.group_labels.empty()) out.group_labels.push_back(data.group_labels[i]);
    out.weights.push_back(data.weights.empty() ? 1.0 : data.weights[i]);
  }
  return out;
}

}  // namespace checklist
