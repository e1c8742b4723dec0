#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "checklist/path.hpp"
#include "oracle.hpp"

using namespace checklist;

namespace {

PathConfig small_cfg(bool restrict = true) {
  PathConfig cfg;
  cfg.solve.time_limit = 30;
  cfg.restrict_search = restrict;
  return cfg;
}

std::int64_t scaled(const BinaryDataset& data, const Checklist& c, long long p = 1, long long q = 1) {
  const auto e = oracle::evaluate(data, c.item_ids, c.M);
  return oracle::value(oracle::weights(data.n, data.d, p, q), e.fn, e.fp, c.N(), c.M);
}

}  // namespace

TEST(PathNM, InstanceOrder) {
  const auto r = path_nm(oracle::d0(), {}, 3, small_cfg());
  std::vector<std::pair<int, int>> order;
  for (const auto& s : r.steps) order.emplace_back(s.n_max, s.m_max);
  EXPECT_EQ(order, (std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}, {3, 1}, {3, 2}, {3, 3}}));
}

TEST(PathNM, MatchesDirectSolves) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 8; ++t) {
    const auto data = oracle::random_instance(rng, 30, 8, 0.4, 0, t % 2 ? 2 : 1);
    ConstraintSet cons;
    cons.one_per_group = t % 2;
    if (t % 3 == 0) cons.fnr_cap = 0.3;
    const auto r = path_nm(data, cons, 4, small_cfg());
    for (const auto& s : r.steps) {
      ConstraintSet c = cons;
      c.max_items = s.n_max;
      c.m_max = s.m_max;
      const auto truth = oracle::brute_force(data, c);
      if (!truth.value) {
        EXPECT_FALSE(s.best);
        continue;
      }
      ASSERT_TRUE(s.best) << s.n_max << "," << s.m_max;
      EXPECT_EQ(s.status, "optimal");
      const auto& cl = r.pool.entries()[*s.best].checklist;
      EXPECT_TRUE(oracle::feasible(data, c, cl.item_ids, cl.M));
      EXPECT_EQ(scaled(data, cl), *truth.value) << "t=" << t << " step " << s.n_max << "," << s.m_max;
    }
  }
}

TEST(PathNM, RestrictionDoesNotChangeReportedOptima) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 6; ++t) {
    const auto data = oracle::random_instance(rng, 40, 8);
    ConstraintSet cons;
    if (t % 2) cons.fpr_cap = 0.3;
    const auto on = path_nm(data, cons, 4, small_cfg(true));
    const auto off = path_nm(data, cons, 4, small_cfg(false));
    ASSERT_EQ(on.steps.size(), off.steps.size());
    int restricted = 0;
    for (std::size_t k = 0; k < on.steps.size(); ++k) {
      EXPECT_EQ(on.steps[k].objective, off.steps[k].objective) << k;
      EXPECT_EQ(on.steps[k].status, off.steps[k].status) << k;
      restricted += on.steps[k].restricted;
      EXPECT_FALSE(off.steps[k].restricted);
    }
    EXPECT_GT(restricted, 0);
  }
}

TEST(PathNM, ObjectiveNonincreasingInN) {
  std::mt19937_64 rng(47);
  const auto data = oracle::random_instance(rng, 60, 10);
  const auto r = path_nm(data, {}, 5, small_cfg());
  for (int j = 1; j <= 5; ++j)
    for (int i = j + 1; i <= 5; ++i) {
      ASSERT_TRUE(r.step(i, j) && r.step(i - 1, j));
      EXPECT_LE(r.step(i, j)->objective, r.step(i - 1, j)->objective);
    }
  for (int i = 2; i <= 5; ++i)
    for (int j = 2; j <= i; ++j) EXPECT_LE(r.step(i, j)->objective, r.step(i, j - 1)->objective);
}

TEST(PathNM, PoolHasNoDuplicates) {
  std::mt19937_64 rng(53);
  const auto r = path_nm(oracle::random_instance(rng, 40, 8), {}, 4, small_cfg());
  for (std::size_t a = 0; a < r.pool.size(); ++a)
    for (std::size_t b = a + 1; b < r.pool.size(); ++b)
      EXPECT_FALSE(r.pool.entries()[a].checklist.same_rule(r.pool.entries()[b].checklist));
}

TEST(PathNM, RejectsZeroSize) { EXPECT_THROW(path_nm(oracle::d0(), {}, 0), Error); }

TEST(FnrGrid, Arithmetic) {
  const auto g = fnr_grid(0.2, 0.05);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_NEAR(g[0], 0.05, 1e-12);
  EXPECT_NEAR(g[3], 0.2, 1e-12);
  const auto h = fnr_grid(0.22, 0.05);
  EXPECT_EQ(h.size(), 5u);
  EXPECT_NEAR(h.back(), 0.22, 1e-12);
  EXPECT_THROW(fnr_grid(0.1, 0.2), Error);
  EXPECT_THROW(fnr_grid(0.1, 0.0), Error);
}

TEST(PathFnr, MinimizesFalsePositivesUnderEachCap) {
  std::mt19937_64 rng(59);
  for (int t = 0; t < 5; ++t) {
    const auto data = oracle::random_instance(rng, 40, 8);
    ConstraintSet cons;
    cons.max_items = 4;
    const auto r = path_fnr(data, cons, 0.4, 0.1, small_cfg());
    ASSERT_EQ(r.steps.size(), 4u);
    const auto nn = static_cast<long long>(data.n_neg());
    std::optional<double> prev_fpr;
    for (const auto& s : r.steps) {
      ConstraintSet c = cons;
      c.fnr_cap = s.fnr_cap;
      const auto truth = oracle::brute_force(data, c, nn, 1);
      if (!truth.value) {
        EXPECT_FALSE(s.best);
        continue;
      }
      ASSERT_TRUE(s.best);
      const auto& e = r.pool.entries()[*s.best];
      EXPECT_EQ(scaled(data, e.checklist, nn, 1), *truth.value);
      EXPECT_LE(static_cast<long>(e.report.fn), oracle::allowed(*s.fnr_cap, static_cast<long>(data.n_pos())));
      if (prev_fpr) {
        EXPECT_LE(*e.fpr(), *prev_fpr + 1e-12);
      }
      prev_fpr = e.fpr();
    }
  }
}

TEST(PathFnr, NestedPathReachesTheSameEndpoint) {
  std::mt19937_64 rng(61);
  const auto data = oracle::random_instance(rng, 30, 7);
  ConstraintSet cons;
  cons.max_items = 3;
  auto nested = small_cfg();
  nested.nest_nm = true;
  nested.n_max = 3;
  const auto a = path_fnr(data, cons, 0.3, 0.15, small_cfg());
  const auto b = path_fnr(data, cons, 0.3, 0.15, nested);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t k = 0; k < a.steps.size(); ++k) EXPECT_NEAR(a.steps[k].objective, b.steps[k].objective, 1e-9);
}

TEST(PathFnr, ScreeningRecipeEndpoint) {
  // min FPR with FNR <= 5%, one threshold per question, at most 8 questions
  std::mt19937_64 rng(67);
  const auto data = oracle::random_instance(rng, 200, 24, 0.5, 0, 3);
  ConstraintSet cons;
  cons.max_items = 8;
  cons.one_per_group = true;
  const auto r = path_fnr(data, cons, 0.05, 0.05, small_cfg());
  ASSERT_EQ(r.steps.size(), 1u);
  ASSERT_TRUE(r.steps[0].best);
  const auto& e = r.pool.entries()[*r.steps[0].best];
  EXPECT_LE(static_cast<long>(e.report.fn), oracle::allowed(0.05, static_cast<long>(data.n_pos())));
  ConstraintSet c = cons;
  c.fnr_cap = 0.05;
  EXPECT_TRUE(check_feasible(e.checklist, data, c).feasible);
}

TEST(Frontier, CsvColumns) {
  const auto r = path_fnr(oracle::d0(), {}, 0.5, 0.5, small_cfg());
  std::ostringstream os;
  write_frontier_csv(os, r);
  std::istringstream in(os.str());
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "N,M,fnr_cap,train_fnr,train_fpr,objective,gap,status");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("1,1,0.5,0,0,", 0), 0u) << line;
  EXPECT_NE(line.find(",optimal"), std::string::npos);
}
