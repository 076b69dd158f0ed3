#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "flexsched/errors.hpp"
#include "flexsched/scheduler.hpp"
#include "support/instances.hpp"

using namespace flexsched;

namespace {

PlantConfig small_plant(int n, int min_on) {
  PlantConfig c;
  c.name = "small";
  c.horizon_slots = n;
  c.h_sidc = 1;
  c.machines = {Machine{2, 10, min_on, 0}};
  c.silos = {Silo{1000, 0, 0, 0}};
  c.demand_tph.assign(static_cast<std::size_t>(n), 0);
  c.grid_limit_mw = 2;
  c.sidc_trade_limit_mw = 2;
  return c;
}

// A schedule consistent with every balance: the grid covers the machine load.
Schedule consistent(const PlantConfig& c, const std::vector<int>& y) {
  Schedule s;
  const auto n = y.size();
  s.p_b.resize(n);
  s.p_m.assign(n, 0);
  s.p_c.assign(n, 0);
  s.p_d.assign(n, 0);
  s.p_s.assign(n, 0);
  s.y = {y};
  s.inv.assign(1, std::vector<double>(n));
  double stock = c.silos[0].initial_t;
  for (std::size_t t = 0; t < n; ++t) {
    s.p_b[t] = c.machines[0].power_mw * y[t];
    stock += (c.machines[0].production_tph * y[t] - c.demand_tph[t]) * c.slot_hours;
    s.inv[0][t] = stock;
  }
  return s;
}

int count_field(const std::vector<Violation>& v, const std::string& field) {
  return static_cast<int>(std::count_if(v.begin(), v.end(), [&](const Violation& x) { return x.field == field; }));
}

// Daily sine day-ahead prices; the SIDC spikes over the day-ahead trough
// inside the default window, where the baseline buys.
PriceSet spiky_prices() {
  PriceSet p;
  p.day_ahead_eur_mwh.resize(192);
  p.sidc_eur_mwh.resize(192);
  for (int t = 0; t < 192; ++t) {
    const double base = 60 + 25 * std::sin(2 * 3.141592653589793 * t / 24.0);
    p.day_ahead_eur_mwh[static_cast<std::size_t>(t)] = std::round(base);
    p.sidc_eur_mwh[static_cast<std::size_t>(t)] = std::round(base) + 3;
  }
  for (int t = 40; t < 44; ++t) p.sidc_eur_mwh[static_cast<std::size_t>(t)] = 400;
  return p;
}

}  // namespace

TEST(CheckSchedule, ConsistentScheduleIsClean) {
  const auto c = small_plant(8, 6);
  EXPECT_TRUE(check_schedule(consistent(c, {1, 1, 1, 1, 1, 1, 0, 0}), c).empty());
}

TEST(CheckSchedule, ShortRunIsOneMinOnViolation) {
  const auto c = small_plant(8, 6);
  const auto v = check_schedule(consistent(c, {1, 1, 1, 1, 1, 0, 0, 0}), c);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].field, "min_on");
}

TEST(CheckSchedule, RunCutByHorizonIsAllowed) {
  const auto c = small_plant(8, 6);
  EXPECT_TRUE(check_schedule(consistent(c, {0, 0, 0, 0, 1, 1, 1, 1}), c).empty());
}

TEST(CheckSchedule, TradeBeforeWindowIsOneWindowViolation) {
  const auto c = small_plant(8, 1);
  auto s = consistent(c, {1, 1, 1, 0, 0, 0, 0, 0});
  const TradingWindow w{4, 6, 2};
  EXPECT_TRUE(check_schedule(s, c, {}, w, s.p_b).empty());
  const auto pins = s.p_b;
  // Buy 0.5 MW on the SIDC at slot tau1 - 1 and spill it.
  s.p_m[2] = 0.5;
  s.p_s[2] = 0.5;
  const auto v = check_schedule(s, c, {}, w, pins);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].field, "window");
}

TEST(CheckSchedule, MovedPinIsFlagged) {
  const auto c = small_plant(8, 1);
  auto s = consistent(c, {1, 1, 1, 0, 0, 0, 0, 0});
  const auto pins = s.p_b;
  s.p_b[1] -= 1;
  s.p_m[1] = 1;
  const auto v = check_schedule(s, c, {}, TradingWindow{2, 3, 1}, pins);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].field, "pin");
}

TEST(CheckSchedule, CorruptedBalances) {
  const auto c = small_plant(8, 1);
  auto s = consistent(c, {1, 1, 0, 0, 0, 0, 0, 0});
  s.inv[0][3] += 1;
  s.p_b[5] = 1;
  const auto v = check_schedule(s, c);
  EXPECT_EQ(count_field(v, "mass_balance"), 2);
  EXPECT_EQ(count_field(v, "power_balance"), 1);
}

TEST(CheckSchedule, CarriedStateMustHold) {
  auto c = small_plant(8, 4);
  CarryState carry;
  carry.machine_history = {{0, 1}};
  const auto v = check_schedule(consistent(c, {1, 0, 0, 0, 0, 0, 0, 0}), c, carry);
  EXPECT_EQ(count_field(v, "initial_state"), 1);
}

TEST(Scheduler, FlatPricesGiveNoRevenue) {
  const auto c = builtin_config("cement");
  const PriceSet p{std::vector<double>(192, 50), std::vector<double>(192, 50)};
  const auto day = run_day(c, p);
  EXPECT_EQ(day.delta_phi, 0);
  EXPECT_TRUE(day.accepted);
  EXPECT_EQ(day.phi_dagger, day.phi_star);
  EXPECT_EQ(day.flexible.p_b, day.baseline.p_b);
  EXPECT_EQ(day.flexible.y, day.baseline.y);
  EXPECT_EQ(day.window, (TradingWindow{24, 48, 22}));
}

TEST(Scheduler, SellsIntoSidcSpike) {
  const auto c = builtin_config("cement");
  const auto p = spiky_prices();
  const auto day = run_day(c, p);
  EXPECT_GT(day.delta_phi, 0);
  EXPECT_NEAR(day.delta_phi, day.phi_star - day.phi_dagger, 1e-9);
  double sold = 0;
  for (int t = 40; t < 44; ++t) sold += std::min(0.0, day.flexible.p_m[static_cast<std::size_t>(t)]);
  EXPECT_LT(sold, 0);
  for (int t = 0; t < day.window.tau2; ++t) {
    EXPECT_EQ(day.flexible.p_b[static_cast<std::size_t>(t)], day.baseline.p_b[static_cast<std::size_t>(t)]);
  }
  EXPECT_TRUE(check_schedule(day.flexible, c, {}, day.window, day.baseline.p_b).empty());
  EXPECT_TRUE(check_schedule(day.baseline, c).empty());
}

TEST(Scheduler, MinimumRevenueRejectsTrade) {
  auto c = builtin_config("cement");
  const auto p = spiky_prices();
  const auto open = run_day(c, p);
  c.min_revenue_eur = open.delta_phi + 1;
  const auto day = run_day(c, p);
  EXPECT_FALSE(day.accepted);
  EXPECT_EQ(day.delta_phi, 0);
  EXPECT_EQ(flexibility_revenue(day), 0);
  EXPECT_NEAR(day.raw_delta_phi, open.delta_phi, 1e-6 * std::abs(open.phi_star));
  EXPECT_EQ(day.flexible.p_m, day.baseline.p_m);
  EXPECT_EQ(day.phi_dagger, day.phi_star);
}

TEST(Scheduler, RevenueIsDelta) {
  DayResult d;
  d.phi_star = 100;
  d.phi_dagger = 97;
  d.delta_phi = 3;
  EXPECT_EQ(flexibility_revenue(d), 3);
}

TEST(Scheduler, ZeroTradeLimitKeepsBaseline) {
  auto c = builtin_config("steel");
  c.sidc_trade_limit_mw = 0;
  const auto day = run_day(c, spiky_prices());
  EXPECT_EQ(day.phi_dagger, day.phi_star);
  EXPECT_EQ(day.delta_phi, 0);
}

TEST(Scheduler, ExportsAreDeterministic) {
  const auto c = builtin_config("cement");
  const auto p = spiky_prices();
  const auto a = run_day(c, p);
  const auto b = run_day(c, p);
  EXPECT_EQ(day_result_csv(a), day_result_csv(b));
  EXPECT_EQ(day_result_json(a), day_result_json(b));
  const auto csv = day_result_csv(a);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 192);
}

TEST(Scheduler, InfeasibleCarryIsReported) {
  const auto c = builtin_config("cement");
  CarryState carry;
  carry.storage_t = {8000};
  const PriceSet p{std::vector<double>(192, 50), std::vector<double>(192, 50)};
  EXPECT_THROW(run_day(c, p, carry), InfeasibleByConstruction);
}

TEST(Scheduler, RandomDaysPassChecks) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 4; ++i) {
    const auto inst = flexsched::testing::random_daily(rng, i % 2 == 1);
    const auto day = run_day(inst.config, inst.prices);
    EXPECT_GE(day.delta_phi, 0);
    EXPECT_LE(day.phi_dagger, day.phi_star + 1e-6 * std::abs(day.phi_star));
    EXPECT_TRUE(check_schedule(day.baseline, inst.config).empty());
    EXPECT_TRUE(check_schedule(day.flexible, inst.config, {}, day.window, day.baseline.p_b).empty());
  }
}
