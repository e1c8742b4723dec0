#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "checklist/core.hpp"
#include "checklist/dataset.hpp"

namespace checklist {

struct PoolEntry {
  Checklist checklist;
  ConfusionReport report;
  double objective = 0.0;
  std::string status;  // solver status, or "heuristic"
  std::string tag;     // which instance produced it, e.g. "N<=3,M<=2"
  double gap = 0.0;
  std::optional<double> fnr_cap;
  std::map<std::string, std::string> meta;

  int N() const { return checklist.N(); }
  int M() const { return checklist.M; }
  std::optional<double> fnr() const { return report.fnr(); }
  std::optional<double> fpr() const { return report.fpr(); }
};

// Checklists evaluated on one training dataset, at most one entry per
// (item set, M).
class ChecklistPool {
 public:
  explicit ChecklistPool(double w_minus = 1.0) : w_minus_(w_minus) {}

  double w_minus() const { return w_minus_; }
  const std::vector<PoolEntry>& entries() const { return entries_; }
  std::vector<PoolEntry>& entries() { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Evaluates `c` on `data` and inserts it unless the same rule is present.
  // Returns the entry index.
  std::size_t add(const Checklist& c, const BinaryDataset& data, std::string status, std::string tag) {
    for (std::size_t k = 0; k < entries_.size(); ++k)
      if (entries_[k].checklist.same_rule(c)) return k;
    PoolEntry e;
    e.checklist = c;
    e.report = confusion(c, data);
    e.objective = objective(c, data, w_minus_);
    e.status = std::move(status);
    e.tag = std::move(tag);
    entries_.push_back(std::move(e));
    return entries_.size() - 1;
  }

  // Stable sort by (objective, N, M, items).
  void sort_by_objective() {
    std::stable_sort(entries_.begin(), entries_.end(), [](const PoolEntry& a, const PoolEntry& b) {
      if (a.objective != b.objective) return a.objective < b.objective;
      if (a.N() != b.N()) return a.N() < b.N();
      if (a.M() != b.M()) return a.M() < b.M();
      return a.checklist.item_ids < b.checklist.item_ids;
    });
  }

  const PoolEntry* best(const std::function<bool(const PoolEntry&)>& keep = {}) const {
    const PoolEntry* out = nullptr;
    for (const auto& e : entries_) {
      if (keep && !keep(e)) continue;
      if (!out || e.objective < out->objective) out = &e;
    }
    return out;
  }

  // Best entry with N <= n_max and M <= m_max.
  const PoolEntry* best_within(int n_max, int m_max) const {
    return best([&](const PoolEntry& e) { return e.N() <= n_max && e.M() <= m_max; });
  }

  // Best entry whose training FNR is at most `cap`.
  const PoolEntry* best_with_fnr(double cap) const {
    return best([&](const PoolEntry& e) { return e.fnr().value_or(0.0) <= cap + 1e-12; });
  }

  void merge(const ChecklistPool& other, const BinaryDataset& data) {
    for (const auto& e : other.entries_) {
      const auto k = add(e.checklist, data, e.status, e.tag);
      if (entries_[k].meta.empty()) entries_[k].meta = e.meta;
    }
  }

 private:
  double w_minus_ = 1.0;
  std::vector<PoolEntry> entries_;
};

}  // namespace checklist
