#pragma once

#include <vector>

#include "flexsched/linear_model.hpp"
#include "flexsched/market_calendar.hpp"
#include "flexsched/plant.hpp"
#include "flexsched/solver.hpp"

namespace flexsched {

// Per-slot prices over the planning horizon. SIDC entries outside trading
// sessions may be NaN.
struct PriceSet {
  std::vector<double> day_ahead_eur_mwh;  // pi_b
  std::vector<double> sidc_eur_mwh;       // pi_m
};

// State entering slot 1 of a planning window. Empty members mean the
// standalone default: silos at I_0, machines OFF with no pending obligation.
struct CarryState {
  std::vector<double> storage_t;                  // per silo
  std::vector<std::vector<int>> machine_history;  // per machine, oldest first
  int day_index = 0;
};

// Column indices of every model symbol. Entries are -1 when the symbol is
// absent (P_m in the baseline, split flows with a single silo).
struct VariableMap {
  int slots = 0;
  std::vector<int> p_b, p_m, p_c, p_d, p_s;      // [slot]
  std::vector<std::vector<int>> y;               // [machine][slot]
  std::vector<std::vector<int>> start_up;        // [machine][slot], M_ON >= 2
  std::vector<std::vector<int>> shut_down;       // [machine][slot], M_OFF >= 2
  std::vector<std::vector<int>> inv;             // [silo][slot]
  std::vector<std::vector<int>> flow_in;         // [silo][slot]
  std::vector<std::vector<int>> flow_out;        // [silo][slot]
};

struct BuiltModel {
  LinearModel model;
  VariableMap map;
};

struct Schedule {
  std::vector<double> p_b, p_m, p_c, p_d, p_s;  // MW per slot
  std::vector<std::vector<int>> y;              // [machine][slot]
  std::vector<std::vector<double>> inv;         // [silo][slot], tonnes at slot end
  double total_cost_eur = 0;
  std::vector<double> on_hours;  // per machine

  int slots() const { return static_cast<int>(p_b.size()); }
};

// Machine state going into slot 1 and the slots that must keep it because a
// run started in the history is still inside its minimum length.
struct InitialMachineState {
  int state = 0;
  int forced_slots = 0;
};
InitialMachineState initial_machine_state(const Machine& machine, const std::vector<int>& history);

// Storage at slot 0 per silo.
std::vector<double> initial_storage(const PlantConfig& config, const CarryState& carry);

// Throws ValidationError for an invalid config or short price series and
// InfeasibleByConstruction when the demand pre-scan fails.
BuiltModel build_baseline(const PlantConfig& config, const PriceSet& prices, const CarryState& carry = {});

// `baseline` pins P_b on slots 1..tau2; P_m is free in [-LC1, LC1] inside
// the window and zero elsewhere.
BuiltModel build_flexible(const PlantConfig& config, const PriceSet& prices, const Schedule& baseline,
                          const TradingWindow& window, const CarryState& carry = {});

// Rows the builders emit: per slot one power balance, one storage cover row,
// one mass balance (S + 2 with S > 1 silos: production split, demand split
// and one per silo) and two state-of-charge rows when a battery is present.
// With machines present, two cumulative rows per slot bound the on-slots run
// so far from below (demand drawn since slot 1) and above (silo room).
// Per machine and slot, M_ON >= 2 adds three rows: the aggregated minimum on
// row, a start-up indicator row and the start-up window row; M_OFF >= 2 adds
// the same three for shut-downs. The cumulative and indicator rows only
// tighten the LP relaxation; they admit exactly the same on/off patterns.
int expected_constraint_count(const PlantConfig& config);

// Cost of a schedule recomputed from its arrays.
double schedule_cost(const Schedule& schedule, const PlantConfig& config, const PriceSet& prices);

// Maps a baseline solution vector into the flexible model's columns, with
// P_m = 0. Feasible for the flexible model built from that baseline.
std::vector<double> lift_baseline_solution(const std::vector<double>& baseline_values,
                                           const VariableMap& baseline, const VariableMap& flexible,
                                           int flexible_columns);

// Throws SolutionIncomplete when the solution has no values or its
// recomputed cost differs from the solver objective by more than 1e-6
// relative.
Schedule extract_schedule(const Solution& solution, const VariableMap& map, const PlantConfig& config,
                          const PriceSet& prices);

}  // namespace flexsched
