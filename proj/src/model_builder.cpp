#include "flexsched/model_builder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flexsched/errors.hpp"

namespace flexsched {

namespace {

std::string idx(const char* symbol, int t) { return std::string(symbol) + "_" + std::to_string(t + 1); }

std::string idx(const char* symbol, int k, int t) {
  return std::string(symbol) + "_" + std::to_string(k + 1) + "_" + std::to_string(t + 1);
}

void require_valid(const PlantConfig& config, const PriceSet& prices) {
  const auto violations = validate(config);
  for (const auto& v : violations) {
    // The demand pre-scan has its own error type.
    if (v.field != "demand_tph" || v.reason.find("cumulative demand") == std::string::npos) {
      throw ValidationError(v.field + ": " + v.reason);
    }
  }
  const auto n = static_cast<std::size_t>(config.horizon_slots);
  if (prices.day_ahead_eur_mwh.size() < n) {
    throw ValidationError("day-ahead prices cover " + std::to_string(prices.day_ahead_eur_mwh.size()) +
                          " of " + std::to_string(n) + " slots");
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (!std::isfinite(prices.day_ahead_eur_mwh[t])) {
      throw ValidationError("day-ahead price missing at slot " + std::to_string(t + 1));
    }
  }
}

struct FlexibleParts {
  const Schedule* baseline;
  TradingWindow window;
};

BuiltModel build(const PlantConfig& config, const PriceSet& prices, const CarryState& carry,
                 const FlexibleParts* flex) {
  require_valid(config, prices);
  const auto storage0 = initial_storage(config, carry);
  if (auto reason = prescan_feasibility(config, &storage0)) throw InfeasibleByConstruction(*reason);

  const int n = config.horizon_slots;
  const int machines = static_cast<int>(config.machines.size());
  const int silos = static_cast<int>(config.silos.size());
  const double dt = config.slot_hours;
  const Battery& bat = config.battery;
  const bool battery = bat.present();

  if (flex) {
    const auto& w = flex->window;
    if (w.tau1 < 1 || w.tau2 < w.tau1 || w.tau2 > n) {
      throw ValidationError("trading window [" + std::to_string(w.tau1) + ", " + std::to_string(w.tau2) +
                            "] outside the horizon");
    }
    if (flex->baseline->slots() < n) throw ValidationError("baseline schedule shorter than the horizon");
    for (int t = w.tau1 - 1; t < w.tau2; ++t) {
      if (static_cast<std::size_t>(t) >= prices.sidc_eur_mwh.size() ||
          !std::isfinite(prices.sidc_eur_mwh[static_cast<std::size_t>(t)])) {
        throw ValidationError("SIDC price missing at tradeable slot " + std::to_string(t + 1));
      }
    }
  }

  BuiltModel out;
  LinearModel& m = out.model;
  VariableMap& map = out.map;
  map.slots = n;
  const auto N = static_cast<std::size_t>(n);
  map.p_b.resize(N);
  map.p_s.resize(N);
  map.p_c.resize(N);
  map.p_d.resize(N);
  map.p_m.assign(N, -1);
  map.y.assign(static_cast<std::size_t>(machines), std::vector<int>(N, -1));
  map.start_up.assign(static_cast<std::size_t>(machines), std::vector<int>(N, -1));
  map.shut_down.assign(static_cast<std::size_t>(machines), std::vector<int>(N, -1));
  map.inv.assign(static_cast<std::size_t>(silos), std::vector<int>(N, -1));
  map.flow_in.assign(static_cast<std::size_t>(silos), std::vector<int>(N, -1));
  map.flow_out.assign(static_cast<std::size_t>(silos), std::vector<int>(N, -1));

  std::vector<InitialMachineState> init(static_cast<std::size_t>(machines));
  for (int k = 0; k < machines; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    init[uk] = initial_machine_state(config.machines[uk],
                                     uk < carry.machine_history.size() ? carry.machine_history[uk] : std::vector<int>{});
  }

  for (int t = 0; t < n; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    double pb_lo = 0, pb_up = config.grid_limit_mw;
    if (flex && t < flex->window.tau2) pb_lo = pb_up = flex->baseline->p_b[ut];
    map.p_b[ut] = m.add_continuous(idx("Pb", t), pb_lo, pb_up);
    if (flex) {
      const bool open = flex->window.contains(t + 1);
      const double lc1 = open ? config.sidc_trade_limit_mw : 0.0;
      map.p_m[ut] = m.add_continuous(idx("Pm", t), -lc1, lc1);
    }
    map.p_c[ut] = m.add_continuous(idx("Pc", t), 0, battery ? bat.max_charge_mw : 0.0);
    map.p_d[ut] = m.add_continuous(idx("Pd", t), 0, battery ? bat.max_discharge_mw : 0.0);
    map.p_s[ut] = m.add_continuous(idx("Ps", t), 0, kInf);
    for (int k = 0; k < machines; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      const int y = m.add_binary(idx("Y", k, t));
      if (t < init[uk].forced_slots) {
        m.variables()[static_cast<std::size_t>(y)].lower = init[uk].state;
        m.variables()[static_cast<std::size_t>(y)].upper = init[uk].state;
      }
      map.y[uk][ut] = y;
      if (config.machines[uk].min_on_slots >= 2) map.start_up[uk][ut] = m.add_continuous(idx("U", k, t), 0, 1);
      if (config.machines[uk].min_off_slots >= 2) map.shut_down[uk][ut] = m.add_continuous(idx("V", k, t), 0, 1);
    }
    for (int i = 0; i < silos; ++i) {
      const auto& s = config.silos[static_cast<std::size_t>(i)];
      map.inv[static_cast<std::size_t>(i)][ut] = m.add_continuous(idx("I", i, t), s.floor_t, s.capacity_t);
      if (silos > 1) {
        map.flow_in[static_cast<std::size_t>(i)][ut] = m.add_continuous(idx("F", i, t), 0, kInf);
        map.flow_out[static_cast<std::size_t>(i)][ut] = m.add_continuous(idx("G", i, t), 0, kInf);
      }
    }
  }

  // Objective.
  for (int t = 0; t < n; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    m.add_objective(map.p_b[ut], prices.day_ahead_eur_mwh[ut] * dt);
    if (flex && flex->window.contains(t + 1)) m.add_objective(map.p_m[ut], prices.sidc_eur_mwh[ut] * dt);
    if (battery) {
      m.add_objective(map.p_c[ut], bat.cycle_cost * dt);
      m.add_objective(map.p_d[ut], bat.cycle_cost * dt);
    }
    for (int i = 0; i < silos; ++i) {
      m.add_objective(map.inv[static_cast<std::size_t>(i)][ut], config.silos[static_cast<std::size_t>(i)].storage_cost * dt);
    }
  }

  for (int t = 0; t < n; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const double demand = config.demand_tph[ut] * dt;

    // Mass balance with demand outflow.
    std::vector<Term> produced;
    for (int k = 0; k < machines; ++k) {
      produced.push_back({map.y[static_cast<std::size_t>(k)][ut], config.machines[static_cast<std::size_t>(k)].production_tph * dt});
    }
    if (silos == 1) {
      std::vector<Term> row = produced;
      row.push_back({map.inv[0][ut], -1.0});
      double rhs = demand;
      if (t > 0) row.push_back({map.inv[0][ut - 1], 1.0});
      else rhs -= storage0[0];
      m.add_constraint(idx("mass", t), row, Relation::Equal, rhs);
    } else {
      std::vector<Term> split_in = produced;
      std::vector<Term> split_out;
      for (int i = 0; i < silos; ++i) {
        split_in.push_back({map.flow_in[static_cast<std::size_t>(i)][ut], -1.0});
        split_out.push_back({map.flow_out[static_cast<std::size_t>(i)][ut], 1.0});
      }
      m.add_constraint(idx("split_in", t), split_in, Relation::Equal, 0.0);
      m.add_constraint(idx("split_out", t), split_out, Relation::Equal, demand);
      for (int i = 0; i < silos; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        std::vector<Term> row = {{map.inv[ui][ut], 1.0}, {map.flow_in[ui][ut], -1.0}, {map.flow_out[ui][ut], 1.0}};
        double rhs = 0;
        if (t > 0) row.push_back({map.inv[ui][ut - 1], -1.0});
        else rhs = storage0[ui];
        m.add_constraint(idx("mass", i, t), row, Relation::Equal, rhs);
      }
    }

    // Power balance: Pb + Pm + Pd + PV = Ps + Pc + sum Y P.
    std::vector<Term> power = {{map.p_b[ut], 1.0}, {map.p_d[ut], 1.0}, {map.p_s[ut], -1.0}, {map.p_c[ut], -1.0}};
    if (flex) power.push_back({map.p_m[ut], 1.0});
    for (int k = 0; k < machines; ++k) {
      power.push_back({map.y[static_cast<std::size_t>(k)][ut], -config.machines[static_cast<std::size_t>(k)].power_mw});
    }
    m.add_constraint(idx("power", t), power, Relation::Equal, -config.pv_at(t));

    // Storage cover.
    std::vector<Term> cover;
    for (int i = 0; i < silos; ++i) cover.push_back({map.inv[static_cast<std::size_t>(i)][ut], 1.0});
    m.add_constraint(idx("cover", t), cover, Relation::GreaterEqual, config.demand_cover_floor ? demand : 0.0);

    // Battery state of charge, cumulative from slot 1.
    if (battery) {
      std::vector<Term> soc;
      for (int j = 0; j <= t; ++j) {
        soc.push_back({map.p_c[static_cast<std::size_t>(j)], dt});
        soc.push_back({map.p_d[static_cast<std::size_t>(j)], -dt});
      }
      m.add_constraint(idx("soc_max", t), soc, Relation::LessEqual, bat.capacity_mwh * bat.depth_of_discharge - bat.soc0_mwh);
      m.add_constraint(idx("soc_min", t), soc, Relation::GreaterEqual,
                       bat.capacity_mwh * (1 - bat.depth_of_discharge) - bat.soc0_mwh);
    }
  }

  // Cumulative production bounds rounded to whole machine slots: whatever
  // runs through slot t must cover the demand drawn so far and fit in the
  // silos. Valid for every integer schedule; they cut fractional ones.
  if (machines > 0) {
    double pi_max = 0, pi_min = kInf, floors = 0, caps = 0, stock0 = 0;
    for (const auto& mc : config.machines) {
      pi_max = std::max(pi_max, mc.production_tph * dt);
      pi_min = std::min(pi_min, mc.production_tph * dt);
    }
    for (std::size_t i = 0; i < config.silos.size(); ++i) {
      floors += config.silos[i].floor_t;
      caps += config.silos[i].capacity_t;
      stock0 += storage0[i];
    }
    std::vector<Term> prefix;
    double drawn = 0;
    for (int t = 0; t < n; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      drawn += config.demand_tph[ut] * dt;
      for (int k = 0; k < machines; ++k) prefix.push_back({map.y[static_cast<std::size_t>(k)][ut], 1.0});
      const double need = drawn - stock0 + std::max(floors, config.demand_cover_floor ? config.demand_tph[ut] * dt : 0.0);
      m.add_constraint(idx("cum_min", t), prefix, Relation::GreaterEqual, std::ceil(need / pi_max - 1e-6));
      m.add_constraint(idx("cum_max", t), prefix, Relation::LessEqual, std::floor((drawn - stock0 + caps) / pi_min + 1e-6));
    }
  }

  // Minimum on/off times. Row t covers the transition into slot t+1; the
  // state before slot 1 is a constant and the window is truncated at the
  // horizon end.
  for (int k = 0; k < machines; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const auto& mc = config.machines[uk];
    const auto& y = map.y[uk];
    const double y0 = init[uk].state;
    if (mc.min_on_slots >= 2) {
      for (int t = 0; t < n; ++t) {
        const int len = std::min(mc.min_on_slots, n - t);
        // (Y[t+1] - Y[t]) * len <= sum_{j=1..len} Y[t+j]
        std::vector<Term> row = {{y[static_cast<std::size_t>(t)], static_cast<double>(len)}};
        double rhs = 0;
        if (t > 0) row.push_back({y[static_cast<std::size_t>(t - 1)], -static_cast<double>(len)});
        else rhs = y0 * len;
        for (int j = 0; j < len; ++j) row.push_back({y[static_cast<std::size_t>(t + j)], -1.0});
        m.add_constraint(idx("min_on", k, t), row, Relation::LessEqual, rhs);
      }
    }
    if (mc.min_off_slots >= 2) {
      for (int t = 0; t < n; ++t) {
        const int len = std::min(mc.min_off_slots, n - t);
        // sum_{j=1..len} Y[t+j] <= (1 + Y[t+1] - Y[t]) * len
        std::vector<Term> row;
        for (int j = 0; j < len; ++j) row.push_back({y[static_cast<std::size_t>(t + j)], 1.0});
        row.push_back({y[static_cast<std::size_t>(t)], -static_cast<double>(len)});
        double rhs = len;
        if (t > 0) row.push_back({y[static_cast<std::size_t>(t - 1)], static_cast<double>(len)});
        else rhs -= y0 * len;
        m.add_constraint(idx("min_off", k, t), row, Relation::LessEqual, rhs);
      }
    }
    // Start-up and shut-down indicators: U_t >= Y_t - Y_{t-1}, and at most
    // Y_t starts within the last M_ON slots (1 - Y_t shut-downs within the
    // last M_OFF slots).
    if (mc.min_on_slots >= 2) {
      const auto& u = map.start_up[uk];
      for (int t = 0; t < n; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        std::vector<Term> link = {{u[ut], 1.0}, {y[ut], -1.0}};
        double rhs = 0;
        if (t > 0) link.push_back({y[ut - 1], 1.0});
        else rhs = -y0;
        m.add_constraint(idx("start_up", k, t), link, Relation::GreaterEqual, rhs);
        std::vector<Term> window = {{y[ut], -1.0}};
        for (int j = std::max(0, t - mc.min_on_slots + 1); j <= t; ++j) window.push_back({u[static_cast<std::size_t>(j)], 1.0});
        m.add_constraint(idx("start_window", k, t), window, Relation::LessEqual, 0.0);
      }
    }
    if (mc.min_off_slots >= 2) {
      const auto& v = map.shut_down[uk];
      for (int t = 0; t < n; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        std::vector<Term> link = {{v[ut], 1.0}, {y[ut], 1.0}};
        double rhs = 0;
        if (t > 0) link.push_back({y[ut - 1], -1.0});
        else rhs = y0;
        m.add_constraint(idx("shut_down", k, t), link, Relation::GreaterEqual, rhs);
        std::vector<Term> window = {{y[ut], 1.0}};
        for (int j = std::max(0, t - mc.min_off_slots + 1); j <= t; ++j) window.push_back({v[static_cast<std::size_t>(j)], 1.0});
        m.add_constraint(idx("stop_window", k, t), window, Relation::LessEqual, 1.0);
      }
    }
  }
  return out;
}

}  // namespace

InitialMachineState initial_machine_state(const Machine& machine, const std::vector<int>& history) {
  InitialMachineState s;
  if (history.empty()) return s;
  s.state = history.back() ? 1 : 0;
  int run = 0;
  for (auto it = history.rbegin(); it != history.rend() && ((*it != 0) == (s.state == 1)); ++it) ++run;
  // A run spanning the whole history started before it; treat it as complete.
  if (run == static_cast<int>(history.size())) return s;
  const int required = s.state ? machine.min_on_slots : machine.min_off_slots;
  s.forced_slots = std::max(0, required - run);
  return s;
}

std::vector<double> initial_storage(const PlantConfig& config, const CarryState& carry) {
  if (!carry.storage_t.empty()) {
    if (carry.storage_t.size() != config.silos.size()) {
      throw ValidationError("carry-in storage has " + std::to_string(carry.storage_t.size()) + " silos, config has " +
                            std::to_string(config.silos.size()));
    }
    return carry.storage_t;
  }
  std::vector<double> out;
  for (const auto& s : config.silos) out.push_back(s.initial_t);
  return out;
}

BuiltModel build_baseline(const PlantConfig& config, const PriceSet& prices, const CarryState& carry) {
  return build(config, prices, carry, nullptr);
}

BuiltModel build_flexible(const PlantConfig& config, const PriceSet& prices, const Schedule& baseline,
                          const TradingWindow& window, const CarryState& carry) {
  const FlexibleParts parts{&baseline, window};
  return build(config, prices, carry, &parts);
}

int expected_constraint_count(const PlantConfig& config) {
  const int n = config.horizon_slots;
  const int silos = static_cast<int>(config.silos.size());
  int per_slot = 1 + 1 + (silos > 1 ? silos + 2 : 1) + (config.battery.present() ? 2 : 0);
  if (!config.machines.empty()) per_slot += 2;
  int rows = n * per_slot;
  for (const auto& m : config.machines) {
    if (m.min_on_slots >= 2) rows += 3 * n;
    if (m.min_off_slots >= 2) rows += 3 * n;
  }
  return rows;
}

double schedule_cost(const Schedule& s, const PlantConfig& config, const PriceSet& prices) {
  const double dt = config.slot_hours;
  double cost = 0;
  for (int t = 0; t < s.slots(); ++t) {
    const auto ut = static_cast<std::size_t>(t);
    double slot = s.p_b[ut] * prices.day_ahead_eur_mwh[ut];
    if (s.p_m[ut] != 0.0) slot += s.p_m[ut] * prices.sidc_eur_mwh[ut];
    slot += (s.p_c[ut] + s.p_d[ut]) * config.battery.cycle_cost;
    for (std::size_t i = 0; i < s.inv.size(); ++i) slot += s.inv[i][ut] * config.silos[i].storage_cost;
    cost += slot * dt;
  }
  return cost;
}

std::vector<double> lift_baseline_solution(const std::vector<double>& values, const VariableMap& base,
                                           const VariableMap& flex, int flexible_columns) {
  std::vector<double> out(static_cast<std::size_t>(flexible_columns), 0.0);
  auto copy = [&](const std::vector<int>& from, const std::vector<int>& to) {
    for (std::size_t t = 0; t < from.size() && t < to.size(); ++t) {
      if (from[t] >= 0 && to[t] >= 0) out[static_cast<std::size_t>(to[t])] = values[static_cast<std::size_t>(from[t])];
    }
  };
  copy(base.p_b, flex.p_b);
  copy(base.p_c, flex.p_c);
  copy(base.p_d, flex.p_d);
  copy(base.p_s, flex.p_s);
  for (std::size_t k = 0; k < base.y.size(); ++k) {
    copy(base.y[k], flex.y[k]);
    copy(base.start_up[k], flex.start_up[k]);
    copy(base.shut_down[k], flex.shut_down[k]);
  }
  for (std::size_t i = 0; i < base.inv.size(); ++i) {
    copy(base.inv[i], flex.inv[i]);
    copy(base.flow_in[i], flex.flow_in[i]);
    copy(base.flow_out[i], flex.flow_out[i]);
  }
  return out;
}

Schedule extract_schedule(const Solution& solution, const VariableMap& map, const PlantConfig& config,
                          const PriceSet& prices) {
  if (!solution.has_values()) throw SolutionIncomplete("solver returned no values (" + std::string(to_string(solution.status)) + ")");
  const auto& x = solution.values;
  auto value = [&](int col, const char* what, int t) {
    if (col < 0) return 0.0;
    if (static_cast<std::size_t>(col) >= x.size() || !std::isfinite(x[static_cast<std::size_t>(col)])) {
      throw SolutionIncomplete(std::string("no value for ") + what + " at slot " + std::to_string(t + 1));
    }
    return x[static_cast<std::size_t>(col)];
  };
  const int n = map.slots;
  Schedule s;
  s.p_b.resize(static_cast<std::size_t>(n));
  s.p_m.resize(static_cast<std::size_t>(n));
  s.p_c.resize(static_cast<std::size_t>(n));
  s.p_d.resize(static_cast<std::size_t>(n));
  s.p_s.resize(static_cast<std::size_t>(n));
  s.y.assign(map.y.size(), std::vector<int>(static_cast<std::size_t>(n), 0));
  s.inv.assign(map.inv.size(), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  s.on_hours.assign(map.y.size(), 0.0);
  for (int t = 0; t < n; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    s.p_b[ut] = value(map.p_b[ut], "P_b", t);
    s.p_m[ut] = map.p_m.empty() ? 0.0 : value(map.p_m[ut], "P_m", t);
    s.p_c[ut] = value(map.p_c[ut], "P_C", t);
    s.p_d[ut] = value(map.p_d[ut], "P_D", t);
    s.p_s[ut] = value(map.p_s[ut], "P_s", t);
    for (std::size_t k = 0; k < map.y.size(); ++k) {
      s.y[k][ut] = value(map.y[k][ut], "Y", t) > 0.5 ? 1 : 0;
      s.on_hours[k] += s.y[k][ut] * config.slot_hours;
    }
    for (std::size_t i = 0; i < map.inv.size(); ++i) s.inv[i][ut] = value(map.inv[i][ut], "I", t);
  }
  s.total_cost_eur = schedule_cost(s, config, prices);
  const double diff = std::fabs(s.total_cost_eur - solution.objective);
  if (diff > 1e-6 * std::max(1.0, std::fabs(solution.objective))) {
    throw SolutionIncomplete("recomputed cost " + std::to_string(s.total_cost_eur) + " differs from solver objective " +
                             std::to_string(solution.objective));
  }
  return s;
}

}  // namespace flexsched
