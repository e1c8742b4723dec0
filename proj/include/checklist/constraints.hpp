#pragma once

// Declarative model requirements and their compilation into an integer
// program over (lambda, M, z).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "checklist/core.hpp"
#include "checklist/dataset.hpp"
#include "checklist/error.hpp"

namespace checklist {

// An item referenced either by index or by name.
using ItemRef = std::variant<int, std::string>;

inline int resolve_item(const BinaryDataset& data, const ItemRef& ref) {
  if (const int* idx = std::get_if<int>(&ref)) {
    require(*idx >= 0 && static_cast<std::size_t>(*idx) < data.d, ErrorCode::UnknownItem,
            "item index " + std::to_string(*idx) + " out of range");
    return *idx;
  }
  const auto& name = std::get<std::string>(ref);
  const int j = data.find_item(name);
  require(j >= 0, ErrorCode::UnknownItem, "unknown item '" + name + "'");
  return j;
}

inline std::string to_string(const ItemRef& ref) {
  if (const int* idx = std::get_if<int>(&ref)) return std::to_string(*idx);
  return std::get<std::string>(ref);
}

struct ConstraintSet {
  std::optional<int> max_items;
  std::optional<int> min_items;
  std::optional<int> m_min;
  std::optional<int> m_max;
  bool one_per_group = false;
  std::vector<std::pair<ItemRef, ItemRef>> implications;  // (a, b): a selected => b selected
  std::vector<std::vector<ItemRef>> force_positive;       // rows with all listed items set must be +1
  std::optional<double> fnr_cap;
  std::optional<double> fpr_cap;
  std::map<std::string, double> group_fnr_caps;
  std::optional<double> group_fpr_gap;
  std::optional<double> group_fnr_gap;
  double w_minus = 1.0;

  bool uses_groups() const { return !group_fnr_caps.empty() || group_fpr_gap || group_fnr_gap; }

  void validate() const {
    auto frac = [](const std::optional<double>& f, const char* name) {
      if (f) require(*f >= 0.0 && *f <= 1.0, ErrorCode::InvalidArgument, std::string(name) + " must lie in [0,1]");
    };
    frac(fnr_cap, "fnr_cap");
    frac(fpr_cap, "fpr_cap");
    frac(group_fpr_gap, "group_fpr_gap");
    frac(group_fnr_gap, "group_fnr_gap");
    for (const auto& [g, f] : group_fnr_caps)
      require(f >= 0.0 && f <= 1.0, ErrorCode::InvalidArgument, "group_fnr_caps[" + g + "] must lie in [0,1]");
    if (max_items) require(*max_items >= 1, ErrorCode::InvalidArgument, "max_items must be >= 1");
    if (min_items) require(*min_items >= 1, ErrorCode::InvalidArgument, "min_items must be >= 1");
    if (m_min) require(*m_min >= 1, ErrorCode::InvalidArgument, "m_min must be >= 1");
    if (m_max) require(*m_max >= 1, ErrorCode::InvalidArgument, "m_max must be >= 1");
    require(w_minus > 0 && std::isfinite(w_minus), ErrorCode::InvalidArgument, "w_minus must be positive");
  }
};

// Allowed mistakes under a rate cap: ceil(frac * n), robust to float noise.
inline std::int64_t cap_count(double frac, std::size_t n) {
  const double v = frac * static_cast<double>(n);
  return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(v - 1e-9)));
}

// Right-hand side of n_b l_a - n_a l_b <= floor(gamma n_a n_b).
inline std::int64_t disparity_rhs(double gamma, std::size_t na, std::size_t nb) {
  const double v = gamma * static_cast<double>(na) * static_cast<double>(nb);
  return static_cast<std::int64_t>(std::floor(v + 1e-9));
}

// ---------------------------------------------------------------------------
// Exact objective weights

// Best rational approximation with denominator <= max_den (continued fractions).
inline std::pair<std::int64_t, std::int64_t> to_rational(double x, std::int64_t max_den) {
  require(x >= 0 && std::isfinite(x), ErrorCode::InvalidArgument, "cannot rationalize " + std::to_string(x));
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    const double a_d = std::floor(v);
    if (a_d > 9e15) break;
    const auto a = static_cast<std::int64_t>(a_d);
    const std::int64_t p2 = a * p1 + p0;
    const std::int64_t q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = v - a_d;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  if (q1 == 0) return {static_cast<std::int64_t>(std::llround(x)), 1};
  return {p1, q1};
}

// Objective l+ * pos + l- * neg + N * items + M * threshold, all divided by
// `scale`. Integer coefficients make lexicographic tie-breaking exact.
struct ObjectiveWeights {
  std::int64_t pos = 1;
  std::int64_t neg = 1;
  std::int64_t items = 0;
  std::int64_t threshold = 0;
  std::int64_t scale = 1;
  double w_minus = 1.0;
  double eps_n = 0.0;
  double eps_m = 0.0;

  std::int64_t value(std::int64_t fn, std::int64_t fp, std::int64_t N, std::int64_t M) const {
    return pos * fn + neg * fp + items * N + threshold * M;
  }
  double to_double(std::int64_t v) const { return static_cast<double>(v) / static_cast<double>(scale); }
  // Largest possible penalty part for checklists with N, M <= d.
  double max_penalty(std::size_t d) const {
    return to_double(items * static_cast<std::int64_t>(d) + threshold * static_cast<std::int64_t>(d));
  }
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "objective scaling overflow");
  return r;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "objective scaling overflow");
  return r;
}

}  // namespace detail

inline ObjectiveWeights make_weights(std::size_t n, std::size_t d, double w_minus,
                                     std::optional<Penalties> custom = std::nullopt) {
  using detail::checked_add;
  using detail::checked_mul;
  require(n > 0 && d > 0, ErrorCode::InvalidArgument, "objective needs n > 0 and d > 0");
  const auto [p, q] = to_rational(w_minus, 10000);
  require(q > 0 && std::abs(static_cast<double>(p) / static_cast<double>(q) - w_minus) <= 1e-9 * std::max(1.0, w_minus),
          ErrorCode::InvalidArgument, "w_minus must be a rational with denominator <= 10000");
  require(p > 0, ErrorCode::InvalidArgument, "w_minus must be positive");
  ObjectiveWeights w;
  w.w_minus = w_minus;
  const auto nn = static_cast<std::int64_t>(n);
  const auto dd = static_cast<std::int64_t>(d);
  if (!custom) {
    const std::int64_t base = checked_mul(checked_mul(100, nn), checked_mul(dd, dd));
    const std::int64_t s = std::min(p, q);
    w.scale = checked_mul(base, q);
    w.pos = w.scale;
    w.neg = checked_mul(base, p);
    w.items = checked_mul(90 * dd, s);
    w.threshold = checked_mul(81, s);
  } else {
    const auto [a, b] = to_rational(custom->eps_n, 1000000);
    const auto [c, e] = to_rational(custom->eps_m, 1000000);
    require(std::abs(static_cast<double>(a) / b - custom->eps_n) <= 1e-12 * std::max(1.0, custom->eps_n) &&
                std::abs(static_cast<double>(c) / e - custom->eps_m) <= 1e-12 * std::max(1.0, custom->eps_m),
            ErrorCode::InvalidArgument, "penalties must be rationals with denominator <= 1e6");
    std::int64_t scale = std::lcm(q, std::lcm(b, e));
    w.scale = scale;
    w.pos = scale;
    w.neg = checked_mul(scale / q, p);
    w.items = checked_mul(scale / b, a);
    w.threshold = checked_mul(scale / e, c);
  }
  // the largest attainable objective must fit comfortably
  std::int64_t worst = checked_add(checked_mul(w.pos, nn), checked_mul(w.neg, nn));
  worst = checked_add(worst, checked_mul(w.items + w.threshold, dd));
  (void)checked_mul(worst, 4);
  w.eps_n = w.to_double(w.items);
  w.eps_m = w.to_double(w.threshold);
  return w;
}

// ---------------------------------------------------------------------------
// Linear system (normalized constraint form)

enum class VarType { Binary, Integer };
enum class Sense { LE, GE, EQ };

struct Variable {
  std::string name;
  VarType type = VarType::Binary;
  std::int64_t lb = 0;
  std::int64_t ub = 1;
};

struct Term {
  int var = 0;
  std::int64_t coef = 0;
};

struct LinearConstraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LE;
  std::int64_t rhs = 0;
};

__extension__ using wide_int = __int128;

struct LinearSystem {
  std::vector<Variable> vars;
  std::vector<LinearConstraint> constraints;
  std::vector<Term> objective;  // divided by objective_scale
  std::int64_t objective_scale = 1;

  int add_var(std::string name, VarType type, std::int64_t lb, std::int64_t ub) {
    vars.push_back({std::move(name), type, lb, ub});
    return static_cast<int>(vars.size()) - 1;
  }

  int find_var(std::string_view name) const {
    for (std::size_t k = 0; k < vars.size(); ++k)
      if (vars[k].name == name) return static_cast<int>(k);
    return -1;
  }

  // Names of violated constraints and out-of-bound variables.
  std::vector<std::string> violations(const std::vector<std::int64_t>& value) const {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < vars.size(); ++k)
      if (value[k] < vars[k].lb || value[k] > vars[k].ub) out.push_back("bound:" + vars[k].name);
    for (const auto& c : constraints) {
      wide_int lhs = 0;
      for (const auto& t : c.terms) lhs += static_cast<wide_int>(t.coef) * value[static_cast<std::size_t>(t.var)];
      const bool ok = c.sense == Sense::LE ? lhs <= c.rhs : c.sense == Sense::GE ? lhs >= c.rhs : lhs == c.rhs;
      if (!ok) out.push_back(c.name);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Compiled instance

struct GroupCap {
  int group = 0;
  std::int64_t max_fn = 0;
};

// coef_a * l_a - coef_b * l_b <= rhs, over positive (FNR) or negative (FPR) counts.
struct Disparity {
  int a = 0;
  int b = 0;
  bool positives = false;
  std::int64_t coef_a = 0;
  std::int64_t coef_b = 0;
  std::int64_t rhs = 0;
};

struct IPInstance {
  BinaryDataset data;
  ConstraintSet source;
  ObjectiveWeights weights;
  int n_min = 1;
  int n_max = 1;
  int m_min = 1;
  int m_max = 1;
  bool one_per_group = false;
  std::vector<std::int64_t> big_m;  // per row
  std::vector<std::pair<int, int>> implications;
  std::vector<int> forced_rows;
  std::optional<std::int64_t> max_fn;
  std::optional<std::int64_t> max_fp;
  std::vector<GroupCap> group_caps;
  std::vector<Disparity> disparities;
  LinearSystem system;

  std::size_t n() const { return data.n; }
  std::size_t d() const { return data.d; }
  bool needs_group_counts() const { return !group_caps.empty() || !disparities.empty(); }
};

namespace detail {

inline std::vector<int> resolve_groups_needed(const BinaryDataset& data, const ConstraintSet& cons) {
  std::vector<int> out;
  if (!cons.uses_groups()) return out;
  require(data.has_groups(), ErrorCode::UnknownGroup, "group constraints need group labels in the data");
  for (const auto& [name, frac] : cons.group_fnr_caps) {
    const int g = data.find_group(name);
    require(g >= 0, ErrorCode::UnknownGroup, "unknown group '" + name + "'");
    out.push_back(g);
  }
  return out;
}

inline void build_linear_system(IPInstance& ip) {
  const auto& data = ip.data;
  LinearSystem& s = ip.system;
  s = LinearSystem{};
  const std::size_t d = data.d, n = data.n;
  const auto np = static_cast<std::int64_t>(data.n_pos());
  const auto nn = static_cast<std::int64_t>(data.n_neg());

  for (std::size_t j = 0; j < d; ++j) s.add_var("lam_" + std::to_string(j), VarType::Binary, 0, 1);
  const int vM = s.add_var("M", VarType::Integer, ip.m_min, ip.m_max);
  const int vN = s.add_var("N", VarType::Integer, ip.n_min, ip.n_max);
  const int z0 = static_cast<int>(s.vars.size());
  for (std::size_t i = 0; i < n; ++i) s.add_var("z_" + std::to_string(i), VarType::Binary, 0, 1);
  const int vlp = s.add_var("lpos", VarType::Integer, 0, np);
  const int vln = s.add_var("lneg", VarType::Integer, 0, nn);

  for (std::size_t i = 0; i < n; ++i) {
    LinearConstraint c;
    const bool pos = data.y[i] == 1;
    c.name = (pos ? "errpos_" : "errneg_") + std::to_string(i);
    c.terms.push_back({z0 + static_cast<int>(i), ip.big_m[i]});
    for (std::size_t j = 0; j < d; ++j)
      if (data.at(i, j)) c.terms.push_back({static_cast<int>(j), pos ? 1 : -1});
    c.terms.push_back({vM, pos ? -1 : 1});
    c.sense = Sense::GE;
    c.rhs = pos ? 0 : 1;
    s.constraints.push_back(std::move(c));
  }
  {
    LinearConstraint cp{"def_lpos", {{vlp, 1}}, Sense::EQ, 0};
    LinearConstraint cn{"def_lneg", {{vln, 1}}, Sense::EQ, 0};
    for (std::size_t i = 0; i < n; ++i) (data.y[i] == 1 ? cp : cn).terms.push_back({z0 + static_cast<int>(i), -1});
    s.constraints.push_back(std::move(cp));
    s.constraints.push_back(std::move(cn));
  }
  {
    LinearConstraint c{"def_N", {{vN, 1}}, Sense::EQ, 0};
    for (std::size_t j = 0; j < d; ++j) c.terms.push_back({static_cast<int>(j), -1});
    s.constraints.push_back(std::move(c));
    s.constraints.push_back({"m_le_n", {{vM, 1}, {vN, -1}}, Sense::LE, 0});
  }
  if (ip.one_per_group) {
    for (std::size_t t = 0; t < data.feature_groups.size(); ++t) {
      const auto& g = data.feature_groups[t];
      if (g.size() < 2) continue;
      LinearConstraint c{"grp_" + std::to_string(t), {}, Sense::LE, 1};
      for (int j : g) c.terms.push_back({j, 1});
      s.constraints.push_back(std::move(c));
    }
  }
  for (std::size_t k = 0; k < ip.implications.size(); ++k) {
    const auto [a, b] = ip.implications[k];
    s.constraints.push_back({"impl_" + std::to_string(k), {{b, 1}, {a, -1}}, Sense::GE, 0});
  }
  for (int i : ip.forced_rows) {
    LinearConstraint c{"force_" + std::to_string(i), {}, Sense::GE, 0};
    for (std::size_t j = 0; j < d; ++j)
      if (data.at(static_cast<std::size_t>(i), j)) c.terms.push_back({static_cast<int>(j), 1});
    c.terms.push_back({vM, -1});
    s.constraints.push_back(std::move(c));
  }
  if (ip.max_fn) s.constraints.push_back({"fnr_cap", {{vlp, 1}}, Sense::LE, *ip.max_fn});
  if (ip.max_fp) s.constraints.push_back({"fpr_cap", {{vln, 1}}, Sense::LE, *ip.max_fp});

  if (ip.needs_group_counts()) {
    const std::size_t G = data.group_names.size();
    std::vector<int> vgp(G), vgn(G);
    for (std::size_t g = 0; g < G; ++g) {
      vgp[g] = s.add_var("lpos_g" + std::to_string(g), VarType::Integer, 0, static_cast<std::int64_t>(n));
      vgn[g] = s.add_var("lneg_g" + std::to_string(g), VarType::Integer, 0, static_cast<std::int64_t>(n));
    }
    for (std::size_t g = 0; g < G; ++g) {
      LinearConstraint cp{"defpos_g" + std::to_string(g), {{vgp[g], 1}}, Sense::EQ, 0};
      LinearConstraint cn{"defneg_g" + std::to_string(g), {{vgn[g], 1}}, Sense::EQ, 0};
      for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<std::size_t>(data.group_labels[i]) != g) continue;
        (data.y[i] == 1 ? cp : cn).terms.push_back({z0 + static_cast<int>(i), -1});
      }
      s.constraints.push_back(std::move(cp));
      s.constraints.push_back(std::move(cn));
    }
    for (const auto& gc : ip.group_caps)
      s.constraints.push_back(
          {"gfnr_g" + std::to_string(gc.group), {{vgp[static_cast<std::size_t>(gc.group)], 1}}, Sense::LE, gc.max_fn});
    for (const auto& dsp : ip.disparities) {
      const auto& v = dsp.positives ? vgp : vgn;
      s.constraints.push_back({std::string(dsp.positives ? "gfnrgap_" : "gfprgap_") + std::to_string(dsp.a) + "_" +
                                   std::to_string(dsp.b),
                               {{v[static_cast<std::size_t>(dsp.a)], dsp.coef_a},
                                {v[static_cast<std::size_t>(dsp.b)], -dsp.coef_b}},
                               Sense::LE,
                               dsp.rhs});
    }
  }
  s.objective = {{vlp, ip.weights.pos}, {vln, ip.weights.neg}, {vN, ip.weights.items}, {vM, ip.weights.threshold}};
  s.objective_scale = ip.weights.scale;
}

}  // namespace detail

// Rows (indices) matched by a force-positive predicate: all listed items set.
inline std::vector<int> forced_rows_for(const BinaryDataset& data, const std::vector<int>& items) {
  std::vector<int> rows;
  for (std::size_t i = 0; i < data.n; ++i) {
    bool all = true;
    for (int j : items) all = all && data.at(i, static_cast<std::size_t>(j));
    if (all) rows.push_back(static_cast<int>(i));
  }
  return rows;
}

inline IPInstance compile(const BinaryDataset& data, const ConstraintSet& cons,
                          std::optional<Penalties> penalties = std::nullopt) {
  cons.validate();
  data.validate();
  require(data.n > 0 && data.d > 0, ErrorCode::InvalidArgument, "dataset must have rows and items");
  IPInstance ip;
  ip.data = data;
  ip.source = cons;
  ip.weights = make_weights(data.n, data.d, cons.w_minus, penalties);

  const int d = static_cast<int>(data.d);
  ip.n_max = std::min(cons.max_items.value_or(d), d);
  ip.n_min = std::max(1, cons.min_items.value_or(1));
  ip.m_min = std::max(1, cons.m_min.value_or(1));
  ip.m_max = std::min(cons.m_max.value_or(ip.n_max), ip.n_max);
  ip.one_per_group = cons.one_per_group;
  require(ip.n_min <= ip.n_max, ErrorCode::InfeasibleByConstruction,
          "min_items " + std::to_string(ip.n_min) + " exceeds max_items " + std::to_string(ip.n_max));
  require(ip.m_min <= ip.m_max, ErrorCode::InfeasibleByConstruction,
          "threshold range [" + std::to_string(ip.m_min) + ", " + std::to_string(ip.m_max) + "] is empty");
  if (ip.one_per_group) {
    std::size_t usable = 0;
    for (const auto& g : data.feature_groups) usable += !g.empty();
    require(static_cast<std::size_t>(std::max(ip.n_min, ip.m_min)) <= usable, ErrorCode::InfeasibleByConstruction,
            "not enough feature groups for the required number of items");
  }

  for (const auto& [a, b] : cons.implications)
    ip.implications.emplace_back(resolve_item(data, a), resolve_item(data, b));

  std::set<int> forced;
  for (const auto& pred : cons.force_positive) {
    std::vector<int> items;
    for (const auto& r : pred) items.push_back(resolve_item(data, r));
    for (int i : forced_rows_for(data, items)) forced.insert(i);
  }
  ip.forced_rows.assign(forced.begin(), forced.end());

  const std::size_t np = data.n_pos(), nn = data.n_neg();
  if (cons.fnr_cap) ip.max_fn = cap_count(*cons.fnr_cap, np);
  if (cons.fpr_cap) ip.max_fp = cap_count(*cons.fpr_cap, nn);

  const auto cap_groups = detail::resolve_groups_needed(data, cons);
  std::vector<std::size_t> gpos, gneg;
  if (data.has_groups()) {
    gpos.assign(data.group_names.size(), 0);
    gneg.assign(data.group_names.size(), 0);
    for (std::size_t i = 0; i < data.n; ++i)
      ++(data.y[i] == 1 ? gpos : gneg)[static_cast<std::size_t>(data.group_labels[i])];
  }
  {
    std::size_t k = 0;
    for (const auto& [name, frac] : cons.group_fnr_caps) {
      const int g = cap_groups[k++];
      ip.group_caps.push_back({g, cap_count(frac, gpos[static_cast<std::size_t>(g)])});
    }
  }
  auto add_disparities = [&](double gamma, bool positives) {
    const auto& cnt = positives ? gpos : gneg;
    for (std::size_t a = 0; a < cnt.size(); ++a)
      for (std::size_t b = 0; b < cnt.size(); ++b) {
        if (a == b || cnt[a] == 0 || cnt[b] == 0) continue;  // rates undefined for empty classes
        ip.disparities.push_back({static_cast<int>(a), static_cast<int>(b), positives,
                                  static_cast<std::int64_t>(cnt[b]), static_cast<std::int64_t>(cnt[a]),
                                  disparity_rhs(gamma, cnt[a], cnt[b])});
      }
  };
  if (cons.group_fpr_gap) add_disparities(*cons.group_fpr_gap, false);
  if (cons.group_fnr_gap) add_disparities(*cons.group_fnr_gap, true);

  // tight Big-M values
  ip.big_m.resize(data.n);
  std::size_t forced_neg = 0;
  for (std::size_t i = 0; i < data.n; ++i) {
    std::int64_t support = 0;
    for (std::size_t j = 0; j < data.d; ++j) support += data.at(i, j);
    ip.big_m[i] = data.y[i] == 1 ? ip.m_max : std::min<std::int64_t>(support, ip.n_max);
  }
  for (int i : ip.forced_rows) {
    std::int64_t support = 0;
    for (std::size_t j = 0; j < data.d; ++j) support += data.at(static_cast<std::size_t>(i), j);
    require(support >= 1, ErrorCode::InfeasibleByConstruction,
            "row " + std::to_string(i) + " must be predicted positive but has no items");
    forced_neg += data.y[static_cast<std::size_t>(i)] == -1;
  }
  if (ip.max_fp)
    require(static_cast<std::int64_t>(forced_neg) <= *ip.max_fp, ErrorCode::InfeasibleByConstruction,
            std::to_string(forced_neg) + " negative row(s) are forced positive but fpr_cap allows " +
                std::to_string(*ip.max_fp));
  if (ip.max_fn) {
    std::int64_t hopeless = 0;  // positives with no items can never be predicted +1
    for (std::size_t i = 0; i < data.n; ++i) {
      if (data.y[i] != 1) continue;
      bool any = false;
      for (std::size_t j = 0; j < data.d && !any; ++j) any = data.at(i, j);
      hopeless += !any;
    }
    require(hopeless <= *ip.max_fn, ErrorCode::InfeasibleByConstruction,
            std::to_string(hopeless) + " positive row(s) have no items but fnr_cap allows " +
                std::to_string(*ip.max_fn));
  }
  detail::build_linear_system(ip);
  return ip;
}

// (lambda, M, N, z, counters) assignment induced by a concrete checklist, with
// z_i = 1 exactly on misclassified rows.
inline std::vector<std::int64_t> natural_assignment(const IPInstance& ip, const Checklist& c) {
  const auto& s = ip.system;
  std::vector<std::int64_t> v(s.vars.size(), 0);
  for (int j : c.item_ids) v[static_cast<std::size_t>(j)] = 1;
  v[static_cast<std::size_t>(s.find_var("M"))] = c.M;
  v[static_cast<std::size_t>(s.find_var("N"))] = c.N();
  const int z0 = s.find_var("z_0");
  const auto& data = ip.data;
  std::int64_t lp = 0, ln = 0;
  std::vector<std::int64_t> gp(data.group_names.size(), 0), gn(data.group_names.size(), 0);
  for (std::size_t i = 0; i < data.n; ++i) {
    const bool wrong = predict(c, data.row(i)) != data.y[i];
    v[static_cast<std::size_t>(z0) + i] = wrong;
    if (data.y[i] == 1) lp += wrong;
    else ln += wrong;
    if (data.has_groups()) (data.y[i] == 1 ? gp : gn)[static_cast<std::size_t>(data.group_labels[i])] += wrong;
  }
  v[static_cast<std::size_t>(s.find_var("lpos"))] = lp;
  v[static_cast<std::size_t>(s.find_var("lneg"))] = ln;
  if (ip.needs_group_counts())
    for (std::size_t g = 0; g < data.group_names.size(); ++g) {
      v[static_cast<std::size_t>(s.find_var("lpos_g" + std::to_string(g)))] = gp[g];
      v[static_cast<std::size_t>(s.find_var("lneg_g" + std::to_string(g)))] = gn[g];
    }
  return v;
}

// ---------------------------------------------------------------------------
// Direct feasibility check on a concrete checklist

struct Violation {
  std::string constraint;
  std::string detail;
  double margin = 0.0;  // amount by which the constraint is exceeded
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
};

inline FeasibilityReport check_feasible(const Checklist& c, const BinaryDataset& data, const ConstraintSet& cons) {
  FeasibilityReport rep;
  auto violate = [&](std::string name, std::string detail, double margin) {
    rep.feasible = false;
    rep.violations.push_back({std::move(name), std::move(detail), margin});
  };
  const int N = c.N();
  if (N < 1 || c.M < 1 || c.M > N) violate("m_le_n", "M=" + std::to_string(c.M) + " N=" + std::to_string(N), 1);
  for (int j : c.item_ids)
    if (j < 0 || static_cast<std::size_t>(j) >= data.d) {
      violate("items", "item index " + std::to_string(j) + " out of range", 1);
      return rep;
    }
  if (cons.max_items && N > *cons.max_items)
    violate("max_items", "N=" + std::to_string(N) + " > " + std::to_string(*cons.max_items), N - *cons.max_items);
  if (cons.min_items && N < *cons.min_items)
    violate("min_items", "N=" + std::to_string(N) + " < " + std::to_string(*cons.min_items), *cons.min_items - N);
  if (cons.m_min && c.M < *cons.m_min)
    violate("m_min", "M=" + std::to_string(c.M) + " < " + std::to_string(*cons.m_min), *cons.m_min - c.M);
  if (cons.m_max && c.M > *cons.m_max)
    violate("m_max", "M=" + std::to_string(c.M) + " > " + std::to_string(*cons.m_max), c.M - *cons.m_max);

  std::set<int> chosen(c.item_ids.begin(), c.item_ids.end());
  if (cons.one_per_group) {
    for (std::size_t t = 0; t < data.feature_groups.size(); ++t) {
      int used = 0;
      for (int j : data.feature_groups[t]) used += chosen.count(j) ? 1 : 0;
      if (used > 1) violate("grp_" + std::to_string(t), std::to_string(used) + " items from one feature group", used - 1);
    }
  }
  for (const auto& [ra, rb] : cons.implications) {
    const int a = resolve_item(data, ra), b = resolve_item(data, rb);
    if (chosen.count(a) && !chosen.count(b))
      violate("implication", "'" + data.items[static_cast<std::size_t>(a)].name + "' selected without '" +
                                 data.items[static_cast<std::size_t>(b)].name + "'",
              1);
  }
  const auto pred = predict_all(c, data);
  for (const auto& p : cons.force_positive) {
    std::vector<int> items;
    for (const auto& r : p) items.push_back(resolve_item(data, r));
    std::size_t bad = 0;
    for (int i : forced_rows_for(data, items)) bad += pred[static_cast<std::size_t>(i)] != 1;
    if (bad) violate("force_positive", std::to_string(bad) + " forced row(s) predicted negative", static_cast<double>(bad));
  }

  const auto r = confusion(c, data);
  if (cons.fnr_cap) {
    const auto cap = cap_count(*cons.fnr_cap, r.n_pos);
    if (static_cast<std::int64_t>(r.fn) > cap)
      violate("fnr_cap", "l+=" + std::to_string(r.fn) + " > " + std::to_string(cap),
              static_cast<double>(static_cast<std::int64_t>(r.fn) - cap));
  }
  if (cons.fpr_cap) {
    const auto cap = cap_count(*cons.fpr_cap, r.n_neg);
    if (static_cast<std::int64_t>(r.fp) > cap)
      violate("fpr_cap", "l-=" + std::to_string(r.fp) + " > " + std::to_string(cap),
              static_cast<double>(static_cast<std::int64_t>(r.fp) - cap));
  }
  if (cons.uses_groups()) {
    if (!data.has_groups()) {
      violate("groups", "group constraints set but data has no group labels", 1);
      return rep;
    }
    for (const auto& [name, frac] : cons.group_fnr_caps) {
      const int g = data.find_group(name);
      if (g < 0) {
        violate("gfnr:" + name, "unknown group", 1);
        continue;
      }
      const auto& gc = r.per_group[static_cast<std::size_t>(g)];
      const auto cap = cap_count(frac, gc.n_pos);
      if (static_cast<std::int64_t>(gc.fn) > cap)
        violate("gfnr:" + name, "l_g+=" + std::to_string(gc.fn) + " > " + std::to_string(cap),
                static_cast<double>(static_cast<std::int64_t>(gc.fn) - cap));
    }
    auto gap_check = [&](double gamma, bool positives) {
      for (std::size_t a = 0; a < r.per_group.size(); ++a)
        for (std::size_t b = 0; b < r.per_group.size(); ++b) {
          if (a == b) continue;
          const auto& A = r.per_group[a];
          const auto& B = r.per_group[b];
          const std::size_t na = positives ? A.n_pos : A.n_neg, nb = positives ? B.n_pos : B.n_neg;
          if (na == 0 || nb == 0) continue;
          const std::int64_t la = static_cast<std::int64_t>(positives ? A.fn : A.fp);
          const std::int64_t lb = static_cast<std::int64_t>(positives ? B.fn : B.fp);
          const std::int64_t lhs = static_cast<std::int64_t>(nb) * la - static_cast<std::int64_t>(na) * lb;
          const std::int64_t rhs = disparity_rhs(gamma, na, nb);
          if (lhs > rhs) {
            const double gap = static_cast<double>(la) / na - static_cast<double>(lb) / nb;
            violate(std::string(positives ? "gfnr_gap:" : "gfpr_gap:") + r.group_names[a] + ">" + r.group_names[b],
                    "rate gap " + std::to_string(gap) + " > " + std::to_string(gamma), gap - gamma);
          }
        }
    };
    if (cons.group_fpr_gap) gap_check(*cons.group_fpr_gap, false);
    if (cons.group_fnr_gap) gap_check(*cons.group_fnr_gap, true);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// LP export

inline void write_lp(std::ostream& os, const IPInstance& ip) {
  const auto& s = ip.system;
  auto coef = [](double v) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
  };
  auto write_terms = [&](const std::vector<Term>& terms, auto value_of) {
    bool first = true;
    for (const auto& t : terms) {
      const auto v = value_of(t.coef);
      if (v == 0) continue;
      if (first) os << (v < 0 ? " - " : " ");
      else os << (v < 0 ? " - " : " + ");
      const auto a = v < 0 ? -v : v;
      if (a != 1) os << coef(static_cast<double>(a)) << " ";
      os << s.vars[static_cast<std::size_t>(t.var)].name;
      first = false;
    }
    if (first) os << " 0";
  };
  os << "\\ predictive checklist integer program\n";
  os << "\\ n=" << ip.n() << " d=" << ip.d() << "\n";
  os << "Minimize\n obj:";
  write_terms(s.objective, [&](std::int64_t c) { return static_cast<double>(c) / static_cast<double>(s.objective_scale); });
  os << "\nSubject To\n";
  for (const auto& c : s.constraints) {
    os << " " << c.name << ":";
    write_terms(c.terms, [](std::int64_t v) { return v; });
    os << (c.sense == Sense::LE ? " <= " : c.sense == Sense::GE ? " >= " : " = ") << c.rhs << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : s.vars)
    if (v.type == VarType::Integer) os << " " << v.lb << " <= " << v.name << " <= " << v.ub << "\n";
  os << "General\n";
  for (const auto& v : s.vars)
    if (v.type == VarType::Integer) os << " " << v.name << "\n";
  os << "Binary\n";
  for (const auto& v : s.vars)
    if (v.type == VarType::Binary) os << " " << v.name << "\n";
  os << "End\n";
}

}  // namespace checklist
