#pragma once

#include <string>
#include <vector>

#include "flexsched/rolling_sim.hpp"

namespace flexsched {

enum class SweepParameter { DemandRatio, StorageRatio, MinOn, MinOff };

SweepParameter parse_sweep_parameter(const std::string& name);
const char* to_string(SweepParameter parameter);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::DemandRatio;
  std::vector<double> values;
  std::string base_config = "cement";
};

// Grid used when no values are given.
std::vector<double> default_sweep_values(SweepParameter parameter);

// Throws BadParams: demand ratio in (0, 0.9], storage ratio >= 8, run
// lengths integral with M_ON >= 1 and M_OFF >= 0.
void validate_sweep(const SweepSpec& spec);

// Base config with one parameter replaced. Ratios are taken against the
// total machine output: demand_ratio sets D_t = r * Pi; storage_ratio sets
// I_max = r * Pi and scales I_min and I_0 by the same factor.
PlantConfig apply_parameter(const PlantConfig& base, SweepParameter parameter, double value);

struct SweepPoint {
  double value = 0;
  bool feasible = false;
  double normalized_cost = 0;     // EUR/MWh
  double normalized_savings = 0;  // EUR/MWh
  double savings_per_mw = 0;
  int skipped_days = 0;
  double runtime_s = 0;
  std::string diagnostic;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepPoint> points;  // aligned with spec.values
};

struct SweepOptions {
  SimOptions sim;
  int workers = 1;
  Date start;
  int days = 28;
};

// Points run concurrently up to `workers`; each point gets its own solver
// state, so the result does not depend on the worker count. A point whose
// simulation fails is recorded as infeasible and the sweep goes on.
SweepResult run_sweep(const SweepSpec& spec, const PlantConfig& base, const PriceStore& prices,
                      const SweepOptions& options);

// The combined settings D/Pi = 0.5, I_max/Pi = 40, M_ON = 1, M_OFF = 1.
PlantConfig synergy_config(const PlantConfig& base);

struct SynergyResult {
  SweepPoint before;
  SweepPoint after;
};

SynergyResult run_synergy(const PlantConfig& base, const PriceStore& prices, const SweepOptions& options);

std::string sweep_csv(const SweepResult& result);
std::string synergy_csv(const SynergyResult& result);

}  // namespace flexsched
