#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flexsched/prices.hpp"
#include "flexsched/scheduler.hpp"

namespace flexsched {

struct LedgerDay {
  Date date;  // first day (D-1) of the planning window
  int day_index = 0;
  bool skipped = false;
  std::string diagnostic;  // why a day was skipped
  double phi_star = 0;
  double phi_dagger = 0;
  double delta_phi = 0;
  double raw_delta_phi = 0;
  bool accepted = true;
  TradingWindow window;
  std::vector<double> on_hours;     // baseline, whole horizon, per machine
  std::vector<double> storage_end;  // per silo after the committed slots
  SolveStatus baseline_status = SolveStatus::Optimal;
  SolveStatus flexible_status = SolveStatus::Optimal;
};

struct SimulationLedger {
  std::string config_name;
  std::vector<LedgerDay> days;
  double annual_phi_star = 0;
  double annual_phi_dagger = 0;
  double annual_savings = 0;
  std::vector<double> total_on_hours;  // per machine
};

struct SimOptions {
  DayOptions day;
  bool lenient = false;      // record infeasible days and move on
  bool carry_machine_state = true;
  std::function<void(const LedgerDay&)> on_day;  // progress hook, called in order
};

// Carry state after committing the first 24 slots of `executed`.
CarryState advance_carry(const PlantConfig& config, const CarryState& carry, const Schedule& executed,
                         bool carry_machine_state);

// Serial fold of run_day over `days` planning windows, the first starting on
// `start`. Each window needs eight days of prices. Throws MissingPrices
// before solving anything, InfeasibleDay unless lenient.
SimulationLedger run_year(const PlantConfig& config, const PriceStore& prices, Date start, int days,
                          const SimOptions& options = {});

struct Normalized {
  double cost_eur_mwh = 0;
  double savings_eur_mwh = 0;
};

// Annual Phi* and savings divided by the machine energy sum_k P_k * on_hours_k.
// Throws ZeroOperation when no machine ran.
Normalized normalize(const SimulationLedger& ledger, const PlantConfig& config);

// Annual savings per MW of flexible machine power.
double savings_per_mw(const SimulationLedger& ledger, const PlantConfig& config);

std::string ledger_csv(const SimulationLedger& ledger);
std::string ledger_json(const SimulationLedger& ledger, const PlantConfig& config);

}  // namespace flexsched
