#include "flexsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flexsched/errors.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace flexsched {

namespace {

constexpr double kBalanceTol = 1e-6;
constexpr double kBoundTol = 1e-6;

std::string at_slot(int t) { return "slot " + std::to_string(t + 1); }

std::string join(const std::vector<Violation>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size() && i < 5; ++i) {
    if (i) out += "; ";
    out += v[i].field + ": " + v[i].reason;
  }
  if (v.size() > 5) out += "; ...";
  return out;
}

Solution solve_with(const DayOptions& options, const LinearModel& model, std::span<const double> seed) {
  if (options.solver) return options.solver->solve(model, options.solve, seed);
  return solve_mip(model, options.solve, seed);
}

void require_solution(const Solution& s, const char* stage) {
  switch (s.status) {
    case SolveStatus::Optimal:
    case SolveStatus::FeasibleGapLimit: return;
    case SolveStatus::Infeasible: throw InfeasibleDay(std::string(stage) + " model is infeasible");
    case SolveStatus::Unbounded: throw SolverAborted(std::string(stage) + " model is unbounded");
    case SolveStatus::Aborted: throw SolverAborted(std::string(stage) + " solve aborted: " + s.message);
  }
}

}  // namespace

std::vector<Violation> check_schedule(const Schedule& s, const PlantConfig& config, const CarryState& carry,
                                      std::optional<TradingWindow> window, std::span<const double> pins) {
  std::vector<Violation> out;
  auto fail = [&](const char* field, const std::string& reason) { out.push_back({field, reason}); };
  const int n = s.slots();
  const double dt = config.slot_hours;
  const auto silos = config.silos.size();
  const auto machines = config.machines.size();

  if (n != config.horizon_slots) fail("slots", "schedule has " + std::to_string(n) + " slots, horizon is " + std::to_string(config.horizon_slots));
  if (s.y.size() != machines || s.inv.size() != silos) {
    fail("shape", "machine or silo count does not match the config");
    return out;
  }
  const auto storage0 = initial_storage(config, carry);

  for (int t = 0; t < n; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    // Mass balance over the silos taken together.
    double produced = 0, load = 0;
    for (std::size_t k = 0; k < machines; ++k) {
      const int y = s.y[k][ut];
      if (y != 0 && y != 1) fail("binary", "Y" + std::to_string(k + 1) + " not 0/1 at " + at_slot(t));
      produced += config.machines[k].production_tph * y * dt;
      load += config.machines[k].power_mw * y;
    }
    double before = 0, after = 0;
    for (std::size_t i = 0; i < silos; ++i) {
      before += t > 0 ? s.inv[i][ut - 1] : storage0[i];
      after += s.inv[i][ut];
      const auto& silo = config.silos[i];
      if (s.inv[i][ut] < silo.floor_t - kBoundTol || s.inv[i][ut] > silo.capacity_t + kBoundTol) {
        fail("storage_bounds", "silo " + std::to_string(i + 1) + " holds " + std::to_string(s.inv[i][ut]) + " t at " + at_slot(t));
      }
    }
    const double demand = config.demand_tph[ut] * dt;
    const double mass_residual = before + produced - demand - after;
    if (std::fabs(mass_residual) > kBalanceTol) {
      fail("mass_balance", "residual " + std::to_string(mass_residual) + " t at " + at_slot(t));
    }
    const double cover = config.demand_cover_floor ? demand : 0.0;
    if (after < cover - kBoundTol) fail("storage_cover", "total storage below cover at " + at_slot(t));

    // Power balance.
    const double power_residual = s.p_b[ut] + s.p_m[ut] + s.p_d[ut] + config.pv_at(t) - s.p_s[ut] - s.p_c[ut] - load;
    if (std::fabs(power_residual) > kBalanceTol) {
      fail("power_balance", "residual " + std::to_string(power_residual) + " MW at " + at_slot(t));
    }
    if (s.p_b[ut] < -kBoundTol || s.p_s[ut] < -kBoundTol || s.p_c[ut] < -kBoundTol || s.p_d[ut] < -kBoundTol) {
      fail("non_negative", "negative flow at " + at_slot(t));
    }
    if (s.p_b[ut] > config.grid_limit_mw + kBoundTol) fail("grid_limit", "purchase above the grid limit at " + at_slot(t));
    const auto& bat = config.battery;
    const double c_cap = bat.present() ? bat.max_charge_mw : 0.0;
    const double d_cap = bat.present() ? bat.max_discharge_mw : 0.0;
    if (s.p_c[ut] > c_cap + kBoundTol || s.p_d[ut] > d_cap + kBoundTol) {
      fail("battery_power", "charge or discharge above its cap at " + at_slot(t));
    }

    // SIDC trades.
    const bool open = window && window->contains(t + 1);
    if (!open && std::fabs(s.p_m[ut]) > kBoundTol) fail("window", "SIDC trade outside the window at " + at_slot(t));
    if (open && std::fabs(s.p_m[ut]) > config.sidc_trade_limit_mw + kBoundTol) {
      fail("window", "SIDC trade above LC1 at " + at_slot(t));
    }
    if (window && !pins.empty() && t < window->tau2 && ut < pins.size() && s.p_b[ut] != pins[ut]) {
      fail("pin", "grid purchase moved before the window closed at " + at_slot(t));
    }
  }

  // Cumulative battery energy.
  if (config.battery.present()) {
    const auto& bat = config.battery;
    double energy = 0;
    for (int t = 0; t < n; ++t) {
      energy += (s.p_c[static_cast<std::size_t>(t)] - s.p_d[static_cast<std::size_t>(t)]) * dt;
      if (energy > bat.capacity_mwh * bat.depth_of_discharge - bat.soc0_mwh + kBoundTol ||
          energy < bat.capacity_mwh * (1 - bat.depth_of_discharge) - bat.soc0_mwh - kBoundTol) {
        fail("battery_soc", "state of charge out of range at " + at_slot(t));
      }
    }
  }

  // Run lengths by direct scan.
  for (std::size_t k = 0; k < machines; ++k) {
    const auto& mc = config.machines[k];
    const auto init = initial_machine_state(mc, k < carry.machine_history.size() ? carry.machine_history[k] : std::vector<int>{});
    for (int t = 0; t < init.forced_slots && t < n; ++t) {
      if (s.y[k][static_cast<std::size_t>(t)] != init.state) {
        fail("initial_state", "machine " + std::to_string(k + 1) + " leaves its carried-in state early at " + at_slot(t));
        break;
      }
    }
    int prev = init.state;
    int t = 0;
    while (t < n) {
      const int cur = s.y[k][static_cast<std::size_t>(t)];
      int end = t;
      while (end < n && s.y[k][static_cast<std::size_t>(end)] == cur) ++end;
      if (cur != prev) {
        const int need = std::min(cur ? mc.min_on_slots : mc.min_off_slots, n - t);
        if (end - t < need) {
          fail(cur ? "min_on" : "min_off", "machine " + std::to_string(k + 1) + " run of " + std::to_string(end - t) +
                                               " slots from " + at_slot(t) + ", needs " + std::to_string(need));
        }
      }
      prev = cur;
      t = end;
    }
  }
  return out;
}

DayResult run_day(const PlantConfig& config, const PriceSet& prices, const CarryState& carry_in,
                  const DayOptions& options) {
  const MarketCalendar builtin;
  const MarketCalendar& calendar = options.calendar ? *options.calendar : builtin;

  DayResult day;
  day.prices = prices;
  day.window = calendar.window_for_consult(config.h_sidc);
  if (day.window.tau2 > config.horizon_slots) {
    throw ValidationError("trading window ends at slot " + std::to_string(day.window.tau2) + " beyond the horizon");
  }

  const BuiltModel base = build_baseline(config, prices, carry_in);
  const Solution base_sol = solve_with(options, base.model, {});
  require_solution(base_sol, "baseline");
  day.baseline = extract_schedule(base_sol, base.map, config, prices);
  day.baseline_status = base_sol.status;
  day.baseline_stats = base_sol.stats;
  if (auto v = check_schedule(day.baseline, config, carry_in); !v.empty()) {
    throw SolverAborted("baseline schedule fails the plant check: " + join(v));
  }

  const BuiltModel flex = build_flexible(config, prices, day.baseline, day.window, carry_in);
  const auto seed = lift_baseline_solution(base_sol.values, base.map, flex.map, flex.model.num_variables());
  const Solution flex_sol = solve_with(options, flex.model, seed);
  require_solution(flex_sol, "flexible");
  day.flexible = extract_schedule(flex_sol, flex.map, config, prices);
  day.flexible_status = flex_sol.status;
  day.flexible_stats = flex_sol.stats;
  if (auto v = check_schedule(day.flexible, config, carry_in, day.window, day.baseline.p_b); !v.empty()) {
    throw SolverAborted("flexible schedule fails the plant check: " + join(v));
  }

  day.phi_star = day.baseline.total_cost_eur;
  day.raw_delta_phi = day.phi_star - day.flexible.total_cost_eur;
  day.accepted = day.raw_delta_phi >= config.min_revenue_eur;
  // Below this floor a "saving" is rounding in the two objectives.
  const double noise = 1e-9 * std::max(1.0, std::fabs(day.phi_star));
  if (day.accepted && day.raw_delta_phi > noise) {
    day.phi_dagger = day.flexible.total_cost_eur;
    day.delta_phi = day.raw_delta_phi;
  } else {
    // No trade is executed: the baseline stands.
    day.flexible = day.baseline;
    day.phi_dagger = day.phi_star;
    day.delta_phi = 0;
  }
  return day;
}

double flexibility_revenue(const DayResult& day) { return day.delta_phi; }

std::string day_result_csv(const DayResult& day) {
  std::ostringstream out;
  const auto machines = day.baseline.y.size();
  const auto silos = day.baseline.inv.size();
  out << "schedule,slot,day_ahead_price,sidc_price,p_b,p_m,p_c,p_d,p_s";
  for (std::size_t k = 0; k < machines; ++k) out << ",y_" << k + 1;
  for (std::size_t i = 0; i < silos; ++i) out << ",inv_" << i + 1;
  out << "\n";
  auto rows = [&](const char* name, const Schedule& s) {
    for (int t = 0; t < s.slots(); ++t) {
      const auto ut = static_cast<std::size_t>(t);
      const double sidc = ut < day.prices.sidc_eur_mwh.size() ? day.prices.sidc_eur_mwh[ut] : NAN;
      out << name << "," << t + 1 << "," << detail::fixed(day.prices.day_ahead_eur_mwh[ut], 4) << ","
          << (std::isfinite(sidc) ? detail::fixed(sidc, 4) : "") << "," << detail::fixed(s.p_b[ut], 6) << ","
          << detail::fixed(s.p_m[ut], 6) << "," << detail::fixed(s.p_c[ut], 6) << "," << detail::fixed(s.p_d[ut], 6)
          << "," << detail::fixed(s.p_s[ut], 6);
      for (std::size_t k = 0; k < machines; ++k) out << "," << s.y[k][ut];
      for (std::size_t i = 0; i < silos; ++i) out << "," << detail::fixed(s.inv[i][ut], 6);
      out << "\n";
    }
  };
  rows("baseline", day.baseline);
  rows("flexible", day.flexible);
  return out.str();
}

std::string day_result_json(const DayResult& day) {
  nlohmann::ordered_json j;
  j["phi_star_eur"] = day.phi_star;
  j["phi_dagger_eur"] = day.phi_dagger;
  j["delta_phi_eur"] = day.delta_phi;
  j["raw_delta_phi_eur"] = day.raw_delta_phi;
  j["accepted"] = day.accepted;
  j["window"] = {{"h_sidc", day.window.h_sidc}, {"tau1", day.window.tau1}, {"tau2", day.window.tau2}};
  j["baseline"] = {{"status", to_string(day.baseline_status)},
                   {"on_hours", day.baseline.on_hours},
                   {"nodes", day.baseline_stats.nodes},
                   {"simplex_iterations", day.baseline_stats.simplex_iterations}};
  j["flexible"] = {{"status", to_string(day.flexible_status)},
                   {"on_hours", day.flexible.on_hours},
                   {"nodes", day.flexible_stats.nodes},
                   {"simplex_iterations", day.flexible_stats.simplex_iterations}};
  return j.dump(2) + "\n";
}

}  // namespace flexsched
