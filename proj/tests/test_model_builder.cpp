#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "flexsched/errors.hpp"
#include "flexsched/model_builder.hpp"
#include "flexsched/scheduler.hpp"
#include "support/instances.hpp"

using namespace flexsched;
using flexsched::testing::random_tiny;

namespace {

PlantConfig toy() {
  PlantConfig c;
  c.name = "toy";
  c.horizon_slots = 4;
  c.h_sidc = 1;
  c.machines = {Machine{1, 10, 1, 0}};
  c.silos = {Silo{1000, 0, 0, 0}};
  c.demand_tph.assign(4, 5);
  c.grid_limit_mw = 1;
  c.sidc_trade_limit_mw = 1;
  return c;
}

PriceSet flat_prices(int n, double p) {
  return {std::vector<double>(static_cast<std::size_t>(n), p), std::vector<double>(static_cast<std::size_t>(n), p)};
}

SolveOptions exact() {
  SolveOptions o;
  o.mip_gap_rel = 0;
  return o;
}

std::optional<double> optimum(const PlantConfig& c, const PriceSet& p, const CarryState& carry = {}) {
  try {
    const auto b = build_baseline(c, p, carry);
    const auto s = solve_mip(b.model, exact());
    if (s.status == SolveStatus::Infeasible) return std::nullopt;
    EXPECT_EQ(s.status, SolveStatus::Optimal);
    return s.objective;
  } catch (const InfeasibleByConstruction&) {
    return std::nullopt;
  }
}

}  // namespace

TEST(ModelBuilder, ToyFourSlots) {
  const auto c = toy();
  const PriceSet p{{1, 2, 3, 4}, {1, 2, 3, 4}};
  const auto b = build_baseline(c, p);
  const auto s = solve_mip(b.model, exact());
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, 3, 1e-9);
  const auto sched = extract_schedule(s, b.map, c, p);
  EXPECT_EQ(sched.y[0], (std::vector<int>{1, 1, 0, 0}));
  EXPECT_NEAR(sched.total_cost_eur, 3, 1e-9);
  EXPECT_NEAR(schedule_cost(sched, c, p), 3, 1e-9);
  ASSERT_EQ(sched.on_hours.size(), 1u);
  EXPECT_DOUBLE_EQ(sched.on_hours[0], 2);
}

TEST(ModelBuilder, ConstraintCountMatchesFormula) {
  std::vector<PlantConfig> configs = {builtin_config("cement"), builtin_config("steel"), toy()};
  auto multi = builtin_config("cement");
  multi.silos.push_back(Silo{5000, 0, 100, 0.01});
  multi.silos.push_back(Silo{2000, 10, 10, 0});
  multi.machines.push_back(Machine{2, 50, 1, 2});
  multi.grid_limit_mw = multi.total_power_mw();
  multi.battery = Battery{10, 0.8, 5, 2, 2, 1};
  configs.push_back(multi);
  for (const auto& c : configs) {
    ASSERT_TRUE(validate(c).empty()) << c.name << " " << validate(c)[0].field;
    const auto prices = flat_prices(c.horizon_slots, 50);
    SCOPED_TRACE(c.name);
    const auto b = build_baseline(c, prices);
    EXPECT_EQ(b.model.num_constraints(), expected_constraint_count(c)) << c.name;
    EXPECT_TRUE(b.model.check().empty()) << c.name;
    Schedule base;
    base.p_b.assign(static_cast<std::size_t>(c.horizon_slots), 0);
    const auto w = c.horizon_slots >= 48 ? TradingWindow{24, 48, 22} : TradingWindow{2, 3, 1};
    const auto f = build_flexible(c, prices, base, w);
    EXPECT_EQ(f.model.num_constraints(), expected_constraint_count(c)) << c.name;
  }
}

TEST(ModelBuilder, CementCount) {
  // 192 slots: power, cover, mass balance and two cumulative rows per slot,
  // then three rows per slot for each of M_ON = 6 and M_OFF = 3.
  EXPECT_EQ(expected_constraint_count(builtin_config("cement")), 192 * 5 + 192 * 6);
}

TEST(ModelBuilder, VariableMapHandlesAreUnique) {
  auto c = builtin_config("cement");
  c.silos.push_back(Silo{100, 0, 0, 0});
  c.battery = Battery{10, 0.8, 5, 2, 2, 1};
  const auto prices = flat_prices(192, 40);
  Schedule base;
  base.p_b.assign(192, 0);
  const auto f = build_flexible(c, prices, base, TradingWindow{24, 48, 22});
  std::set<int> seen;
  int count = 0;
  auto take = [&](const std::vector<int>& v) {
    for (int j : v) {
      if (j < 0) continue;
      EXPECT_TRUE(seen.insert(j).second) << "duplicate column " << j;
      EXPECT_LT(j, f.model.num_variables());
      ++count;
    }
  };
  const auto& m = f.map;
  for (const auto* v : {&m.p_b, &m.p_m, &m.p_c, &m.p_d, &m.p_s}) take(*v);
  for (const auto* grid : {&m.y, &m.start_up, &m.shut_down, &m.inv, &m.flow_in, &m.flow_out}) {
    for (const auto& v : *grid) take(v);
  }
  EXPECT_EQ(count, f.model.num_variables());
  for (int t = 0; t < 192; ++t) {
    const auto& pm = f.model.variables()[static_cast<std::size_t>(m.p_m[static_cast<std::size_t>(t)])];
    if (t + 1 >= 24 && t + 1 <= 48) {
      EXPECT_EQ(pm.lower, -c.sidc_trade_limit_mw);
      EXPECT_EQ(pm.upper, c.sidc_trade_limit_mw);
    } else {
      EXPECT_EQ(pm.lower, 0);
      EXPECT_EQ(pm.upper, 0);
    }
  }
}

TEST(ModelBuilder, NoBatteryFixesChargeColumns) {
  const auto c = builtin_config("steel");
  const auto b = build_baseline(c, flat_prices(192, 40));
  for (int t = 0; t < 192; ++t) {
    for (int j : {b.map.p_c[static_cast<std::size_t>(t)], b.map.p_d[static_cast<std::size_t>(t)]}) {
      const auto& v = b.model.variables()[static_cast<std::size_t>(j)];
      EXPECT_EQ(v.lower, 0);
      EXPECT_EQ(v.upper, 0);
    }
    EXPECT_EQ(b.map.p_m[static_cast<std::size_t>(t)], -1);
  }
}

TEST(ModelBuilder, PricesTooShort) {
  const auto c = builtin_config("steel");
  EXPECT_THROW(build_baseline(c, flat_prices(100, 40)), ValidationError);
}

TEST(ModelBuilder, MissingSidcInWindow) {
  const auto c = builtin_config("steel");
  auto p = flat_prices(192, 40);
  p.sidc_eur_mwh[30] = std::nan("");
  Schedule base;
  base.p_b.assign(192, 0);
  EXPECT_THROW(build_flexible(c, p, base, TradingWindow{24, 48, 22}), ValidationError);
  EXPECT_NO_THROW(build_flexible(c, p, base, TradingWindow{24, 30, 22}));
}

TEST(ModelBuilder, PrescanRejectsHopelessDemand) {
  auto c = toy();
  c.demand_tph = {20, 20, 20, 20};
  EXPECT_THROW(build_baseline(c, flat_prices(4, 1)), InfeasibleByConstruction);
  // Feasible from I_0 but not from the carried-in stock.
  c = toy();
  c.demand_tph = {12, 12, 12, 12};
  c.silos[0].initial_t = 50;
  EXPECT_NO_THROW(build_baseline(c, flat_prices(4, 1)));
  CarryState carry;
  carry.storage_t = {0};
  EXPECT_THROW(build_baseline(c, flat_prices(4, 1), carry), InfeasibleByConstruction);
  c.machines[0].power_mw = -1;
  EXPECT_THROW(build_baseline(c, flat_prices(4, 1)), ValidationError);
}

TEST(ModelBuilder, LiftedBaselineIsFeasibleForFlexible) {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = random_tiny(rng);
    if (!inst.window || !validate(inst.config).empty()) continue;
    BuiltModel b;
    try {
      b = build_baseline(inst.config, inst.prices, inst.carry);
    } catch (const InfeasibleByConstruction&) {
      continue;
    }
    const auto s = solve_mip(b.model, exact());
    if (s.status != SolveStatus::Optimal) continue;
    const auto sched = extract_schedule(s, b.map, inst.config, inst.prices);
    const auto f = build_flexible(inst.config, inst.prices, sched, *inst.window, inst.carry);
    const auto x = lift_baseline_solution(s.values, b.map, f.map, f.model.num_variables());
    EXPECT_LE(f.model.max_violation(x), 1e-7) << "trial " << trial;
    EXPECT_NEAR(f.model.evaluate_objective(x), s.objective, 1e-7 * std::max(1.0, std::abs(s.objective)));
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

// Without a trade limit the flexible program has the baseline's feasible set.
TEST(ModelBuilder, ZeroTradeLimitKeepsBaselineCost) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = random_tiny(rng);
    inst.config.sidc_trade_limit_mw = 0;
    if (!inst.window || !validate(inst.config).empty()) continue;
    BuiltModel b;
    try {
      b = build_baseline(inst.config, inst.prices, inst.carry);
    } catch (const InfeasibleByConstruction&) {
      continue;
    }
    const auto s = solve_mip(b.model, exact());
    if (s.status != SolveStatus::Optimal) continue;
    const auto sched = extract_schedule(s, b.map, inst.config, inst.prices);
    const auto f = build_flexible(inst.config, inst.prices, sched, *inst.window, inst.carry);
    const auto x = lift_baseline_solution(s.values, b.map, f.map, f.model.num_variables());
    const auto fs = solve_mip(f.model, exact(), x);
    ASSERT_EQ(fs.status, SolveStatus::Optimal);
    EXPECT_EQ(fs.objective, s.objective) << "trial " << trial;
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

// Relaxing a minimum run length or enlarging the silo never raises the
// optimum.
TEST(ModelBuilder, RelaxationMonotonicity) {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = random_tiny(rng);
    auto& c = inst.config;
    c.machines[0].min_on_slots = 3;
    c.machines[0].min_off_slots = 2;
    if (!validate(c).empty()) continue;
    const auto base = optimum(c, inst.prices, inst.carry);
    if (!base) continue;
    auto looser_on = c;
    looser_on.machines[0].min_on_slots = 1;
    auto looser_off = c;
    looser_off.machines[0].min_off_slots = 0;
    auto bigger = c;
    bigger.silos[0].capacity_t *= 1.5;
    for (const auto* relaxed : {&looser_on, &looser_off, &bigger}) {
      const auto r = optimum(*relaxed, inst.prices, inst.carry);
      ASSERT_TRUE(r.has_value()) << "trial " << trial;
      EXPECT_LE(*r, *base + 1e-9) << "trial " << trial;
    }
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

// Two silos with no floors and equal cost hold the same as one silo of the
// combined size.
TEST(ModelBuilder, SplitSiloMatchesSingle) {
  auto c = builtin_config("steel");
  c.horizon_slots = 48;
  c.demand_tph.resize(48);
  c.silos[0] = Silo{2000, 0, 100, 0.02};
  auto split = c;
  split.silos = {Silo{1200, 0, 60, 0.02}, Silo{800, 0, 40, 0.02}};
  std::mt19937_64 rng(5);
  PriceSet p = flat_prices(48, 0);
  for (auto& v : p.day_ahead_eur_mwh) v = std::round(std::uniform_real_distribution<double>(20, 90)(rng));
  const auto one = optimum(c, p);
  const auto two = optimum(split, p);
  ASSERT_TRUE(one && two);
  EXPECT_NEAR(*one, *two, 1e-6 * std::abs(*one));
}

TEST(ModelBuilder, CarriedMachineRunIsHonoured) {
  auto c = toy();
  c.machines[0].min_on_slots = 3;
  // Machine switched on in the last history slot: two more ON slots forced.
  CarryState carry;
  carry.machine_history = {{0, 0, 1}};
  const auto init = initial_machine_state(c.machines[0], carry.machine_history[0]);
  EXPECT_EQ(init.state, 1);
  EXPECT_EQ(init.forced_slots, 2);
  c.silos[0].capacity_t = 1000;
  const PriceSet p{{100, 100, 1, 1}, {0, 0, 0, 0}};
  const auto b = build_baseline(c, p, carry);
  const auto s = solve_mip(b.model, exact());
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  const auto sched = extract_schedule(s, b.map, c, p);
  EXPECT_EQ(sched.y[0][0], 1);
  EXPECT_EQ(sched.y[0][1], 1);
  EXPECT_TRUE(check_schedule(sched, c, carry).empty());
}

TEST(ModelBuilder, InitialMachineState) {
  const Machine m{1, 1, 4, 2};
  EXPECT_EQ(initial_machine_state(m, {}).state, 0);
  EXPECT_EQ(initial_machine_state(m, {}).forced_slots, 0);
  EXPECT_EQ(initial_machine_state(m, {0, 1, 1}).forced_slots, 2);
  EXPECT_EQ(initial_machine_state(m, {1, 1, 1, 1, 1}).forced_slots, 0);
  EXPECT_EQ(initial_machine_state(m, {1, 1, 1, 0}).state, 0);
  EXPECT_EQ(initial_machine_state(m, {1, 1, 1, 0}).forced_slots, 1);
  // A run covering the whole history is taken as complete.
  EXPECT_EQ(initial_machine_state(m, {1, 1}).forced_slots, 0);
}

TEST(ModelBuilder, LpTextRoundTrip) {
  const auto c = toy();
  const auto b = build_baseline(c, PriceSet{{1, 2, 3, 4}, {1, 2, 3, 4}});
  const auto back = read_lp(write_lp(b.model));
  EXPECT_EQ(back.num_variables(), b.model.num_variables());
  EXPECT_EQ(back.num_constraints(), b.model.num_constraints());
  const auto s1 = solve_mip(b.model, exact());
  const auto s2 = solve_mip(back, exact());
  EXPECT_NEAR(s1.objective, s2.objective, 1e-9);
}
