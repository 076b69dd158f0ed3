#include <gtest/gtest.h>

#include "flexsched/errors.hpp"
#include "flexsched/sensitivity.hpp"

using namespace flexsched;

namespace {

PlantConfig two_day_plant() {
  PlantConfig c;
  c.name = "two_day";
  c.horizon_slots = 48;
  c.machines = {Machine{2, 10, 2, 1}};
  c.silos = {Silo{100, 10, 40, 0}};
  c.demand_tph.assign(48, 5);
  c.grid_limit_mw = 2;
  c.sidc_trade_limit_mw = 2;
  return c;
}

PriceStore noisy_prices(int days) {
  SynthParams p;
  p.noise_sd = 10;
  p.seed = 17;
  return synth_prices(SynthKind::Sinusoid, p, parse_date("2023-01-01"), days);
}

SweepOptions short_run(int days) {
  SweepOptions o;
  o.start = parse_date("2023-01-01");
  o.days = days;
  return o;
}

}  // namespace

TEST(SweepParameters, ParseAndName) {
  for (auto p : {SweepParameter::DemandRatio, SweepParameter::StorageRatio, SweepParameter::MinOn,
                 SweepParameter::MinOff}) {
    EXPECT_EQ(parse_sweep_parameter(to_string(p)), p);
  }
  EXPECT_THROW(parse_sweep_parameter("price"), BadParams);
}

TEST(SweepParameters, ValidationRanges) {
  SweepSpec s;
  s.parameter = SweepParameter::DemandRatio;
  s.values = {0.5, 0.9};
  EXPECT_NO_THROW(validate_sweep(s));
  s.values = {0.95};
  EXPECT_THROW(validate_sweep(s), BadParams);
  s.values = {0};
  EXPECT_THROW(validate_sweep(s), BadParams);
  s.parameter = SweepParameter::StorageRatio;
  s.values = {7.9};
  EXPECT_THROW(validate_sweep(s), BadParams);
  s.parameter = SweepParameter::MinOn;
  s.values = {2.5};
  EXPECT_THROW(validate_sweep(s), BadParams);
  s.values = {};
  EXPECT_THROW(validate_sweep(s), BadParams);
  for (auto p : {SweepParameter::DemandRatio, SweepParameter::StorageRatio, SweepParameter::MinOn,
                 SweepParameter::MinOff}) {
    s.parameter = p;
    s.values = default_sweep_values(p);
    EXPECT_NO_THROW(validate_sweep(s));
  }
}

TEST(ApplyParameter, RatiosAgainstMachineOutput) {
  const auto base = builtin_config("cement");
  const auto d = apply_parameter(base, SweepParameter::DemandRatio, 0.5);
  EXPECT_DOUBLE_EQ(d.demand_tph.front(), 180);
  EXPECT_DOUBLE_EQ(d.demand_tph.back(), 180);
  const auto s = apply_parameter(base, SweepParameter::StorageRatio, 40);
  EXPECT_DOUBLE_EQ(s.silos[0].capacity_t, 14400);
  EXPECT_DOUBLE_EQ(s.silos[0].floor_t, 9000 * 14400.0 / 15000);
  EXPECT_DOUBLE_EQ(s.silos[0].initial_t, 9000 * 14400.0 / 15000);
  EXPECT_EQ(apply_parameter(base, SweepParameter::MinOn, 2).machines[0].min_on_slots, 2);
  EXPECT_EQ(apply_parameter(base, SweepParameter::MinOff, 0).machines[0].min_off_slots, 0);
  EXPECT_TRUE(validate(s).empty());
}

TEST(Synergy, CombinedSettings) {
  const auto c = synergy_config(builtin_config("steel"));
  EXPECT_DOUBLE_EQ(c.demand_tph[0], 86);
  EXPECT_DOUBLE_EQ(c.silos[0].capacity_t, 40 * 172);
  EXPECT_EQ(c.machines[0].min_on_slots, 1);
  EXPECT_EQ(c.machines[0].min_off_slots, 1);
}

TEST(RunSweep, IndependentOfWorkerCount) {
  const auto base = two_day_plant();
  const auto prices = noisy_prices(6);
  SweepSpec spec;
  spec.parameter = SweepParameter::MinOn;
  spec.values = {1, 2, 4, 6};
  auto opts = short_run(4);
  const auto serial = run_sweep(spec, base, prices, opts);
  opts.workers = 3;
  const auto parallel = run_sweep(spec, base, prices, opts);
  EXPECT_EQ(sweep_csv(serial), sweep_csv(parallel));
  ASSERT_EQ(serial.points.size(), 4u);
  for (const auto& p : serial.points) EXPECT_TRUE(p.feasible) << p.diagnostic;
}

TEST(RunSweep, InfeasiblePointIsRecorded) {
  auto base = two_day_plant();
  base.silos = {Silo{12, 0, 6, 0}};
  const auto prices = noisy_prices(3);
  SweepSpec spec;
  spec.parameter = SweepParameter::MinOn;
  spec.values = {1, 8};
  const auto r = run_sweep(spec, base, prices, short_run(2));
  EXPECT_TRUE(r.points[0].feasible) << r.points[0].diagnostic;
  EXPECT_FALSE(r.points[1].feasible);
  EXPECT_FALSE(r.points[1].diagnostic.empty());
  EXPECT_NE(sweep_csv(r).find("8,0,"), std::string::npos);
}

TEST(RunSweep, MissingPricesAbortTheSweep) {
  SweepSpec spec;
  spec.parameter = SweepParameter::MinOn;
  spec.values = {1, 2};
  EXPECT_THROW(run_sweep(spec, two_day_plant(), noisy_prices(2), short_run(5)), MissingPrices);
}

TEST(RunSynergy, ReportsBothCases) {
  const auto prices = noisy_prices(4);
  auto opts = short_run(3);
  const auto a = run_synergy(two_day_plant(), prices, opts);
  opts.workers = 2;
  const auto b = run_synergy(two_day_plant(), prices, opts);
  EXPECT_TRUE(a.before.feasible);
  EXPECT_TRUE(a.after.feasible);
  EXPECT_EQ(synergy_csv(a), synergy_csv(b));
}
