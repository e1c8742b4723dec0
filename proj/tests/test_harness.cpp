#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "checklist/harness.hpp"
#include "oracle.hpp"

using namespace checklist;

namespace {

// u decides the label: positives all have u = 10, negatives u in 1..5, so a
// quantile threshold always lands on the separating cut. v and w are noise.
RawTable separable_table(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(1, 10), v(0, 100);
  std::ostringstream csv;
  csv << "u,v,w,y\n";
  for (std::size_t i = 0; i < n; ++i) {
    const int a = u(rng);
    csv << (a >= 6 ? 10 : a) << "," << v(rng) << "," << (rng() % 2 ? "red" : "blue") << "," << (a >= 6 ? "yes" : "no") << "\n";
  }
  std::istringstream in(csv.str());
  Schema s{{{"u", ColumnKind::Continuous},
            {"v", ColumnKind::Continuous},
            {"w", ColumnKind::Categorical},
            {"y", ColumnKind::Label}},
           "yes"};
  return make_table(read_csv(in), s);
}

PipelineConfig fast_pipeline(Method m) {
  PipelineConfig cfg;
  cfg.train.method = m;
  cfg.train.constraints.max_items = 3;
  cfg.train.solve.time_limit = 20;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST(Folds, PartitionArithmetic) {
  std::vector<int> labels(100);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 2 ? 1 : -1;
  const auto f = stratified_folds(labels, 5, 7);
  std::vector<int> size(5, 0), pos(5, 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    ASSERT_GE(f[i], 0);
    ASSERT_LT(f[i], 5);
    ++size[static_cast<std::size_t>(f[i])];
    pos[static_cast<std::size_t>(f[i])] += labels[i] == 1;
  }
  EXPECT_EQ(size, std::vector<int>(5, 20));
  EXPECT_EQ(pos, std::vector<int>(5, 10));
}

TEST(Folds, SeedChangesAssignment) {
  std::vector<int> labels(60, 1);
  for (std::size_t i = 0; i < 30; ++i) labels[i] = -1;
  EXPECT_EQ(stratified_folds(labels, 3, 1), stratified_folds(labels, 3, 1));
  EXPECT_NE(stratified_folds(labels, 3, 1), stratified_folds(labels, 3, 2));
}

TEST(CrossValidate, SeparableDataReachesZeroTestError) {
  const auto table = separable_table(100, 11);
  const auto rep = cross_validate(table, fast_pipeline(Method::Mip), 5);
  ASSERT_EQ(rep.folds.size(), 5u);
  for (const auto& f : rep.folds) {
    EXPECT_EQ(f.n_test, 20u);
    EXPECT_EQ(f.status, "optimal");
    ASSERT_TRUE(f.test_error);
    EXPECT_EQ(*f.test_error, 0.0) << "fold " << f.fold;
  }
  EXPECT_EQ(rep.test_error.max, 0.0);
  ASSERT_TRUE(rep.final_model);
  EXPECT_EQ(*rep.final_train_error, 0.0);
  EXPECT_EQ(*rep.final_train_error_raw, 0.0);
}

TEST(CrossValidate, FoldsCoverEveryRowOnce) {
  const auto table = separable_table(53, 12);
  const auto rep = cross_validate(table, fast_pipeline(Method::Cover), 4);
  std::vector<int> seen(53, 0);
  for (const auto& rows : rep.fold_rows)
    for (auto i : rows) ++seen[i];
  EXPECT_EQ(seen, std::vector<int>(53, 1));
}

TEST(CrossValidate, SummaryRecomputesFromFolds) {
  std::mt19937_64 rng(13);
  std::ostringstream csv;
  csv << "a,b,c,y\n";
  for (int i = 0; i < 120; ++i) {
    const int a = static_cast<int>(rng() % 10), b = static_cast<int>(rng() % 10);
    const bool noisy = rng() % 5 == 0;
    csv << a << "," << b << "," << rng() % 3 << "," << (((a + b >= 9) != noisy) ? 1 : 0) << "\n";
  }
  std::istringstream in(csv.str());
  Schema s{{{"a", ColumnKind::Continuous}, {"b", ColumnKind::Continuous}, {"c", ColumnKind::Ordinal}, {"y", ColumnKind::Label}},
           "1"};
  const auto rep = cross_validate(make_table(read_csv(in), s), fast_pipeline(Method::Mip), 5);
  std::vector<double> te;
  for (const auto& f : rep.folds) te.push_back(*f.test_error);
  const auto sum = summarize(te);
  EXPECT_DOUBLE_EQ(sum.mean, rep.test_error.mean);
  EXPECT_EQ(sum.min, rep.test_error.min);
  EXPECT_EQ(sum.max, rep.test_error.max);
  EXPECT_LE(rep.test_error.min, rep.test_error.mean);
  EXPECT_LE(rep.test_error.mean, rep.test_error.max);
}

TEST(CrossValidate, TestRowsDoNotInfluenceTraining) {
  auto table = separable_table(60, 14);
  auto cfg = fast_pipeline(Method::Cover);
  cfg.parallel_folds = false;
  const auto a = cross_validate(table, cfg, 3);
  // perturb every row of fold 0's test split
  for (auto i : a.fold_rows[0]) table.rows[i][1] = "100000";
  const auto b = cross_validate(table, cfg, 3);
  ASSERT_TRUE(a.folds[0].checklist && b.folds[0].checklist);
  EXPECT_EQ(a.folds[0].checklist->item_names, b.folds[0].checklist->item_names);
  EXPECT_EQ(a.folds[0].checklist->M, b.folds[0].checklist->M);
}

TEST(CrossValidate, TooFewRows) {
  const auto table = separable_table(3, 15);
  try {
    cross_validate(table, fast_pipeline(Method::Cover), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewRows);
  }
}

TEST(CrossValidate, UnitBaselineWithComplements) {
  const auto table = separable_table(80, 16);
  auto cfg = fast_pipeline(Method::Unit);
  cfg.train.unit.penalties = {1e-3, 1e-2};
  const auto rep = cross_validate(table, cfg, 4);
  for (const auto& f : rep.folds) EXPECT_TRUE(f.test_error.has_value());
}

TEST(Pipeline, ThresholdComplementsOnly) {
  const auto table = separable_table(40, 17);
  PipelineConfig cfg;
  cfg.complements = ComplementMode::Thresholds;
  const auto b = fit_binarization(table, cfg);
  for (const auto& it : b.items) {
    if (it.is_complement()) {
      EXPECT_NE(it.source, "w");
    }
  }
  cfg.complements = ComplementMode::All;
  const auto all = fit_binarization(table, cfg);
  EXPECT_GT(all.items.size(), b.items.size());
  const auto ds = materialize(table, all);
  EXPECT_NO_THROW(ds.validate());
}

TEST(Train, DispatchesEachMethod) {
  std::mt19937_64 rng(18);
  const auto data = oracle::random_instance(rng, 80, 8);
  for (Method m : {Method::Mip, Method::Cover, Method::Unit}) {
    TrainConfig cfg;
    cfg.method = m;
    cfg.constraints.max_items = 4;
    cfg.solve.time_limit = 20;
    const auto r = train(data, cfg);
    ASSERT_TRUE(r.checklist) << to_string(m);
    EXPECT_EQ(r.checklist->provenance.method, std::string(to_string(m)));
    EXPECT_LE(r.checklist->N(), 4);
  }
}

TEST(Train, MipIsNoWorseThanHeuristics) {
  std::mt19937_64 rng(19);
  const auto data = oracle::random_instance(rng, 60, 8);
  TrainConfig cfg;
  cfg.constraints.max_items = 4;
  cfg.solve.time_limit = 20;
  const auto mip = train(data, cfg);
  cfg.method = Method::Cover;
  const auto cover = train(data, cfg);
  ASSERT_TRUE(mip.checklist && cover.checklist);
  EXPECT_LE(objective(*mip.checklist, data), objective(*cover.checklist, data));
}

TEST(Train, ContradictoryConstraintsReportInfeasible) {
  const auto data = make_dataset({{1, 0}, {1, 0}, {0, 1}}, {1, -1, -1});
  TrainConfig cfg;
  cfg.constraints.fnr_cap = 0.0;
  cfg.constraints.fpr_cap = 0.0;
  const auto r = train(data, cfg);
  EXPECT_FALSE(r.checklist);
  EXPECT_EQ(r.status, "infeasible");
}

TEST(Fairness, TwoGroupGap) {
  // group a: 3 of 10 negatives flagged, group b: 4 of 10
  std::vector<std::vector<int>> rows;
  std::vector<int> y, g;
  for (int grp = 0; grp < 2; ++grp)
    for (int k = 0; k < 10; ++k) {
      rows.push_back({k < 3 + grp ? 1 : 0});
      y.push_back(-1);
      g.push_back(grp);
    }
  rows.push_back({1});
  y.push_back(1);
  g.push_back(0);
  const auto data = make_dataset(rows, y, g);
  const auto f = fairness_audit(make_checklist(data, {0}, 1), data);
  EXPECT_NEAR(f.max_fpr_gap, 0.1, 1e-12);
  EXPECT_NEAR(*f.worst_fpr, 0.4, 1e-12);
  EXPECT_EQ(*f.worst_fnr, 0.0);
}

TEST(Fairness, SingleGroupHasNoGap) {
  const auto data = make_dataset({{1}, {0}, {1}}, {1, -1, -1}, {0, 0, 0});
  EXPECT_EQ(fairness_audit(make_checklist(data, {0}, 1), data).max_fpr_gap, 0.0);
}

TEST(Fairness, MissingGroups) {
  const auto data = oracle::d0();
  try {
    fairness_audit(make_checklist(data, {0}, 1), data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingGroups);
  }
}

TEST(Fairness, TrainedChecklistRespectsDisparityCap) {
  std::mt19937_64 rng(20);
  for (int t = 0; t < 5; ++t) {
    const auto data = oracle::random_instance(rng, 120, 10, 0.4, 3);
    TrainConfig cfg;
    cfg.constraints.max_items = 4;
    cfg.constraints.group_fpr_gap = 0.15;
    cfg.solve.time_limit = 20;
    const auto r = train(data, cfg);
    if (!r.checklist) continue;
    EXPECT_LE(fairness_audit(*r.checklist, data).max_fpr_gap, 0.15 + 1e-12);
    EXPECT_TRUE(check_feasible(*r.checklist, data, cfg.constraints).feasible);
  }
}
