#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flexsched/errors.hpp"
#include "flexsched/oracle.hpp"
#include "flexsched/scheduler.hpp"
#include "support/instances.hpp"

using namespace flexsched;
using flexsched::testing::random_tiny;

namespace {

SolveOptions exact() {
  SolveOptions o;
  o.mip_gap_rel = 0;
  return o;
}

std::string describe(const PlantConfig& c) {
  const auto& m = c.machines[0];
  std::string s = "n=" + std::to_string(c.horizon_slots) + " P=" + std::to_string(m.power_mw) +
                  " Pi=" + std::to_string(m.production_tph) + " on=" + std::to_string(m.min_on_slots) +
                  " off=" + std::to_string(m.min_off_slots) + " silos=" + std::to_string(c.silos.size());
  return s;
}

}  // namespace

TEST(Oracle, ToyFourSlots) {
  PlantConfig c;
  c.horizon_slots = 4;
  c.machines = {Machine{1, 10, 1, 0}};
  c.silos = {Silo{100, 0, 0, 0}};
  c.demand_tph.assign(4, 5);
  c.grid_limit_mw = 1;
  c.h_sidc = 1;
  PriceSet p{{1, 2, 3, 4}, {1, 2, 3, 4}};
  const auto r = oracle_enumerate(c, p);
  ASSERT_TRUE(r.feasible);
  EXPECT_DOUBLE_EQ(r.cost, 3);
  EXPECT_EQ(r.pattern, (std::vector<int>{1, 1, 0, 0}));
}

TEST(Oracle, SellsAtSidcPeak) {
  // The baseline runs slots 1-3 on cheap day-ahead power. With slot 3
  // tradeable at 200, the flexible plan resells the pinned 2 MW there and
  // makes the lost output up in slot 4 at 50: 20 + 20 + (20 - 400) + 100.
  PlantConfig c;
  c.horizon_slots = 6;
  c.machines = {Machine{2, 10, 1, 0}};
  c.silos = {Silo{100, 0, 0, 0}};
  c.demand_tph.assign(6, 5);
  c.grid_limit_mw = 2;
  c.sidc_trade_limit_mw = 2;
  c.h_sidc = 1;
  PriceSet p{{10, 10, 10, 50, 50, 50}, {0, 0, 200, 0, 0, 0}};
  const auto base = oracle_enumerate(c, p);
  ASSERT_TRUE(base.feasible);
  EXPECT_DOUBLE_EQ(base.cost, 60);
  EXPECT_EQ(base.pattern, (std::vector<int>{1, 1, 1, 0, 0, 0}));

  const TradingWindow w{2, 3, 1};
  const std::vector<double> pins{2, 2, 2, 0, 0, 0};
  const auto flex = oracle_enumerate(c, p, {}, w, pins);
  ASSERT_TRUE(flex.feasible);
  EXPECT_DOUBLE_EQ(flex.cost, -240);
  EXPECT_EQ(flex.pattern, (std::vector<int>{1, 1, 0, 1, 0, 0}));

  SolveOptions exact;
  exact.mip_gap_rel = 0;
  const auto bm = build_baseline(c, p);
  const auto bs = solve_mip(bm.model, exact);
  ASSERT_EQ(bs.status, SolveStatus::Optimal);
  EXPECT_NEAR(bs.objective, 60, 1e-9);
  const auto sched = extract_schedule(bs, bm.map, c, p);
  const auto fm = build_flexible(c, p, sched, w);
  const auto fs = solve_mip(fm.model, exact);
  ASSERT_EQ(fs.status, SolveStatus::Optimal);
  EXPECT_NEAR(fs.objective, -240, 1e-9);
  const auto flex_sched = extract_schedule(fs, fm.map, c, p);
  EXPECT_NEAR(flex_sched.p_m[2], -2, 1e-9);
}

TEST(Oracle, RejectsLargeAndUnsupported) {
  auto c = builtin_config("cement");
  PriceSet p{std::vector<double>(192, 1), std::vector<double>(192, 1)};
  EXPECT_THROW(oracle_enumerate(c, p), TooLarge);
  c.horizon_slots = 4;
  c.machines.push_back(c.machines[0]);
  EXPECT_THROW(oracle_enumerate(c, p), BadParams);
}

// The built-in branch and bound must match enumeration on both programs.
TEST(Oracle, MatchesSolverOnRandomInstances) {
  std::mt19937_64 rng(20240601);
  int feasible = 0, infeasible = 0, windows = 0;
  for (int trial = 0; trial < 600; ++trial) {
    auto inst = random_tiny(rng, 10);
    const auto& c = inst.config;
    if (!validate(c).empty()) continue;
    const auto oracle = oracle_enumerate(c, inst.prices, inst.carry);
    BuiltModel base;
    try {
      base = build_baseline(c, inst.prices, inst.carry);
    } catch (const InfeasibleByConstruction&) {
      EXPECT_FALSE(oracle.feasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    const auto sol = solve_mip(base.model, exact());
    if (!oracle.feasible) {
      EXPECT_EQ(sol.status, SolveStatus::Infeasible) << "trial " << trial << " " << describe(c);
      ++infeasible;
      continue;
    }
    ASSERT_EQ(sol.status, SolveStatus::Optimal) << "trial " << trial << " " << describe(c);
    EXPECT_NEAR(sol.objective, oracle.cost, 1e-6) << "trial " << trial << " " << describe(c);
    ++feasible;

    const auto sched = extract_schedule(sol, base.map, c, inst.prices);
    const auto v = check_schedule(sched, c, inst.carry);
    EXPECT_TRUE(v.empty()) << "trial " << trial << ": " << (v.empty() ? "" : v[0].field + " " + v[0].reason);

    if (!inst.window) continue;
    ++windows;
    const auto flex = build_flexible(c, inst.prices, sched, *inst.window, inst.carry);
    const auto fsol = solve_mip(flex.model, exact());
    const auto foracle = oracle_enumerate(c, inst.prices, inst.carry, inst.window, sched.p_b);
    ASSERT_TRUE(foracle.feasible) << "trial " << trial;
    ASSERT_EQ(fsol.status, SolveStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(fsol.objective, foracle.cost, 1e-6) << "trial " << trial << " " << describe(c);
    EXPECT_LE(fsol.objective, sol.objective + 1e-6);
    const auto fs = extract_schedule(fsol, flex.map, c, inst.prices);
    const auto fv = check_schedule(fs, c, inst.carry, inst.window, sched.p_b);
    EXPECT_TRUE(fv.empty()) << "trial " << trial << ": " << (fv.empty() ? "" : fv[0].field + " " + fv[0].reason);
  }
  EXPECT_GT(feasible, 100);
  EXPECT_GT(infeasible, 5);
  EXPECT_GT(windows, 50);
}
