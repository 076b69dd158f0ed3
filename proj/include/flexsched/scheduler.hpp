#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flexsched/market_calendar.hpp"
#include "flexsched/model_builder.hpp"
#include "flexsched/plant.hpp"
#include "flexsched/solver.hpp"

namespace flexsched {

struct DayOptions {
  SolveOptions solve;
  SolverBackend* solver = nullptr;           // built-in engine when null
  const MarketCalendar* calendar = nullptr;  // built-in table when null
};

struct DayResult {
  PriceSet prices;
  TradingWindow window;
  Schedule baseline;
  Schedule flexible;
  double phi_star = 0;
  double phi_dagger = 0;
  double delta_phi = 0;      // revenue after the acceptance rule
  double raw_delta_phi = 0;  // before it
  bool accepted = true;
  SolveStatus baseline_status = SolveStatus::Optimal;
  SolveStatus flexible_status = SolveStatus::Optimal;
  SolveStats baseline_stats;
  SolveStats flexible_stats;
};

// Baseline solve, then the flexible solve seeded with the baseline, both
// re-verified by check_schedule. Throws InfeasibleDay, SolverAborted.
DayResult run_day(const PlantConfig& config, const PriceSet& prices, const CarryState& carry_in = {},
                  const DayOptions& options = {});

// Re-evaluates every plant rule on the raw arrays. Field names: mass_balance,
// power_balance, storage_bounds, storage_cover, min_on, min_off, initial_state,
// battery_soc, battery_power, grid_limit, non_negative, window, pin.
std::vector<Violation> check_schedule(const Schedule& schedule, const PlantConfig& config,
                                      const CarryState& carry = {},
                                      std::optional<TradingWindow> window = std::nullopt,
                                      std::span<const double> pins = {});

double flexibility_revenue(const DayResult& day);

// One row per slot per schedule.
std::string day_result_csv(const DayResult& day);
std::string day_result_json(const DayResult& day);

}  // namespace flexsched
