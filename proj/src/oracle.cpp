#include "flexsched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flexsched/errors.hpp"

namespace flexsched {

namespace {

constexpr int kMaxSlots = 12;

// Cheapest (pi_b * b + pi_m * m) with b in [bl, bu], m in [ml, mu] and
// b + m >= load. The optimum of a linear cost over this polygon sits on one
// of its vertices.
std::optional<double> cheapest_supply(double load, double bl, double bu, double ml, double mu, double pb, double pm) {
  std::optional<double> best;
  auto consider = [&](double b, double m) {
    if (b < bl - 1e-12 || b > bu + 1e-12 || m < ml - 1e-12 || m > mu + 1e-12) return;
    if (b + m < load - 1e-9) return;
    const double c = pb * b + (mu > ml || m != 0.0 ? pm * m : 0.0);
    if (!best || c < *best) best = c;
  };
  consider(bl, ml);
  consider(bl, mu);
  consider(bu, ml);
  consider(bu, mu);
  consider(bl, load - bl);
  consider(bu, load - bu);
  consider(load - ml, ml);
  consider(load - mu, mu);
  return best;
}

}  // namespace

OracleResult oracle_enumerate(const PlantConfig& config, const PriceSet& prices, const CarryState& carry,
                              std::optional<TradingWindow> window, std::span<const double> pins) {
  const int n = config.horizon_slots;
  if (n > kMaxSlots) throw TooLarge("oracle supports at most 12 slots, got " + std::to_string(n));
  if (config.machines.size() != 1) throw BadParams("oracle needs exactly one machine");
  if (config.battery.present()) throw BadParams("oracle does not model a battery");
  if (config.silos.size() != 1) throw BadParams("oracle needs exactly one silo");
  if (window && !pins.empty() && static_cast<int>(pins.size()) < window->tau2) {
    throw BadParams("pins must cover slots 1..tau2");
  }
  const Machine& mc = config.machines[0];
  const double dt = config.slot_hours;
  const auto init = initial_machine_state(mc, carry.machine_history.empty() ? std::vector<int>{} : carry.machine_history[0]);
  const auto storage0 = initial_storage(config, carry);
  const double stock0 = std::accumulate(storage0.begin(), storage0.end(), 0.0);
  const Silo& silo = config.silos[0];
  const double floors = silo.floor_t, caps = silo.capacity_t;

  OracleResult best;
  std::vector<int> y(static_cast<std::size_t>(n));
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    for (int t = 0; t < n; ++t) y[static_cast<std::size_t>(t)] = (mask >> t) & 1u;

    bool ok = true;
    for (int t = 0; t < init.forced_slots && t < n && ok; ++t) ok = y[static_cast<std::size_t>(t)] == init.state;
    // Every run that starts inside the horizon must last its minimum length
    // or until the horizon ends.
    int prev = init.state;
    for (int t = 0; t < n && ok; ++t) {
      const int cur = y[static_cast<std::size_t>(t)];
      if (cur != prev) {
        const int need = std::min(cur ? mc.min_on_slots : mc.min_off_slots, n - t);
        for (int j = 0; j < need && ok; ++j) ok = y[static_cast<std::size_t>(t + j)] == cur;
      }
      prev = cur;
    }
    if (!ok) continue;

    double cost = 0;
    double stock = stock0;
    for (int t = 0; t < n && ok; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      const double demand = config.demand_tph[ut] * dt;
      stock += (mc.production_tph * y[ut] - config.demand_tph[ut]) * dt;
      const double cover = config.demand_cover_floor ? demand : 0.0;
      if (stock < std::max(floors, cover) - 1e-9 || stock > caps + 1e-9) {
        ok = false;
        break;
      }
      const double load = mc.power_mw * y[ut] - config.pv_at(t);
      double bl = 0, bu = config.grid_limit_mw;
      double ml = 0, mu = 0;
      double pm = 0;
      if (window) {
        if (t < window->tau2 && !pins.empty()) bl = bu = pins[ut];
        if (window->contains(t + 1)) {
          ml = -config.sidc_trade_limit_mw;
          mu = config.sidc_trade_limit_mw;
          pm = prices.sidc_eur_mwh[ut];
        }
      }
      const auto supply = cheapest_supply(load, bl, bu, ml, mu, prices.day_ahead_eur_mwh[ut], pm);
      if (!supply) {
        ok = false;
        break;
      }
      cost += (*supply + silo.storage_cost * stock) * dt;
    }
    if (!ok) continue;
    if (!best.feasible || cost < best.cost - 1e-12) {
      best.feasible = true;
      best.cost = cost;
      best.pattern = y;
    }
  }
  return best;
}

}  // namespace flexsched
