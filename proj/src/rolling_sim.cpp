#include "flexsched/rolling_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flexsched/errors.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace flexsched {

namespace {

constexpr int kCommitSlots = 24;

// Planning windows span eight calendar days: D-1 plus the week ahead.
int window_days(const PlantConfig& config) {
  return (config.horizon_slots + kSlotsPerDay - 1) / kSlotsPerDay;
}

}  // namespace

CarryState advance_carry(const PlantConfig& config, const CarryState& carry, const Schedule& executed,
                         bool carry_machine_state) {
  CarryState next;
  next.day_index = carry.day_index + 1;
  const int commit = std::min(kCommitSlots, executed.slots());
  if (commit < 1 || executed.inv.empty() || executed.y.size() != config.machines.size()) {
    throw BadParams("executed schedule is empty or does not match the plant");
  }
  next.storage_t.reserve(executed.inv.size());
  for (const auto& silo : executed.inv) next.storage_t.push_back(silo[static_cast<std::size_t>(commit - 1)]);
  if (!carry_machine_state) return next;
  next.machine_history.resize(config.machines.size());
  for (std::size_t k = 0; k < config.machines.size(); ++k) {
    auto& h = next.machine_history[k];
    if (k < carry.machine_history.size()) h = carry.machine_history[k];
    h.insert(h.end(), executed.y[k].begin(), executed.y[k].begin() + commit);
    // One slot beyond the longest minimum tells a finished run from one that
    // may still be inside its minimum.
    const auto keep = static_cast<std::size_t>(
        std::max({config.machines[k].min_on_slots, config.machines[k].min_off_slots, 1}) + 1);
    if (h.size() > keep) h.erase(h.begin(), h.end() - static_cast<std::ptrdiff_t>(keep));
  }
  return next;
}

SimulationLedger run_year(const PlantConfig& config, const PriceStore& prices, Date start, int days,
                          const SimOptions& options) {
  if (days < 1) throw BadParams("days must be positive");
  if (auto v = validate(config); !v.empty()) throw ValidationError(v.front().field + ": " + v.front().reason);
  const int span = days - 1 + window_days(config);
  if (auto gap = prices.first_missing(start, span)) {
    throw MissingPrices("no prices for " + format_date(*gap) + ": " + std::to_string(days) +
                        " planning windows from " + format_date(start) + " need prices through " +
                        format_date(start + std::chrono::days{span - 1}));
  }

  SimulationLedger ledger;
  ledger.config_name = config.name;
  ledger.total_on_hours.assign(config.machines.size(), 0);
  CarryState carry;
  for (int d = 0; d < days; ++d) {
    LedgerDay row;
    row.date = start + std::chrono::days{d};
    row.day_index = d;
    try {
      const DayResult day = run_day(config, prices.price_set(row.date, config.horizon_slots), carry, options.day);
      row.phi_star = day.phi_star;
      row.phi_dagger = day.phi_dagger;
      row.delta_phi = day.delta_phi;
      row.raw_delta_phi = day.raw_delta_phi;
      row.accepted = day.accepted;
      row.window = day.window;
      row.on_hours = day.baseline.on_hours;
      row.baseline_status = day.baseline_status;
      row.flexible_status = day.flexible_status;
      carry = advance_carry(config, carry, day.flexible, options.carry_machine_state);
      row.storage_end = carry.storage_t;
    } catch (const InfeasibleDay& e) {
      if (!options.lenient) throw InfeasibleDay(format_date(row.date) + ": " + e.what());
      row.skipped = true;
      row.diagnostic = e.what();
    } catch (const InfeasibleByConstruction& e) {
      if (!options.lenient) throw InfeasibleByConstruction(format_date(row.date) + ": " + e.what());
      row.skipped = true;
      row.diagnostic = e.what();
    }
    if (row.skipped) {
      // Nothing was executed; the next window starts from the same state.
      ++carry.day_index;
      row.storage_end = initial_storage(config, carry);
    } else {
      ledger.annual_phi_star += row.phi_star;
      ledger.annual_phi_dagger += row.phi_dagger;
      ledger.annual_savings += row.delta_phi;
      for (std::size_t k = 0; k < row.on_hours.size(); ++k) ledger.total_on_hours[k] += row.on_hours[k];
    }
    if (options.on_day) options.on_day(row);
    ledger.days.push_back(std::move(row));
  }
  return ledger;
}

Normalized normalize(const SimulationLedger& ledger, const PlantConfig& config) {
  double energy = 0;
  for (std::size_t k = 0; k < config.machines.size() && k < ledger.total_on_hours.size(); ++k) {
    energy += config.machines[k].power_mw * ledger.total_on_hours[k];
  }
  if (!(energy > 0)) throw ZeroOperation("no machine ran during the simulation; normalized figures are undefined");
  return {ledger.annual_phi_star / energy, ledger.annual_savings / energy};
}

double savings_per_mw(const SimulationLedger& ledger, const PlantConfig& config) {
  const double power = config.total_power_mw();
  if (!(power > 0)) throw ZeroOperation("plant has no machine power");
  return ledger.annual_savings / power;
}

std::string ledger_csv(const SimulationLedger& ledger) {
  std::ostringstream out;
  const auto machines = ledger.total_on_hours.size();
  out << "day,date,status,phi_star,phi_dagger,delta_phi,raw_delta_phi,accepted,tau1,tau2";
  for (std::size_t k = 0; k < machines; ++k) out << ",on_hours_" << k + 1;
  std::size_t silos = 0;
  for (const auto& d : ledger.days) silos = std::max(silos, d.storage_end.size());
  for (std::size_t i = 0; i < silos; ++i) out << ",storage_end_" << i + 1;
  out << "\n";
  for (const auto& d : ledger.days) {
    out << d.day_index + 1 << "," << format_date(d.date) << "," << (d.skipped ? "skipped" : "ok") << ","
        << detail::fixed(d.phi_star, 6) << "," << detail::fixed(d.phi_dagger, 6) << "," << detail::fixed(d.delta_phi, 6)
        << "," << detail::fixed(d.raw_delta_phi, 6) << "," << (d.accepted ? 1 : 0) << "," << d.window.tau1 << ","
        << d.window.tau2;
    for (std::size_t k = 0; k < machines; ++k) out << "," << detail::fixed(k < d.on_hours.size() ? d.on_hours[k] : 0, 3);
    for (std::size_t i = 0; i < silos; ++i) {
      out << "," << (i < d.storage_end.size() ? detail::fixed(d.storage_end[i], 6) : "");
    }
    out << "\n";
  }
  return out.str();
}

std::string ledger_json(const SimulationLedger& ledger, const PlantConfig& config) {
  nlohmann::ordered_json j;
  j["config"] = ledger.config_name;
  j["days"] = ledger.days.size();
  if (!ledger.days.empty()) {
    j["first_date"] = format_date(ledger.days.front().date);
    j["last_date"] = format_date(ledger.days.back().date);
  }
  const auto skipped = std::count_if(ledger.days.begin(), ledger.days.end(), [](const LedgerDay& d) { return d.skipped; });
  j["skipped_days"] = skipped;
  j["annual_phi_star_eur"] = ledger.annual_phi_star;
  j["annual_phi_dagger_eur"] = ledger.annual_phi_dagger;
  j["annual_savings_eur"] = ledger.annual_savings;
  j["total_on_hours"] = ledger.total_on_hours;
  try {
    const auto n = normalize(ledger, config);
    j["normalized_cost_eur_mwh"] = n.cost_eur_mwh;
    j["normalized_savings_eur_mwh"] = n.savings_eur_mwh;
  } catch (const ZeroOperation&) {
    j["normalized_cost_eur_mwh"] = nullptr;
    j["normalized_savings_eur_mwh"] = nullptr;
  }
  j["savings_eur_per_mw"] = savings_per_mw(ledger, config);
  nlohmann::ordered_json diag = nlohmann::ordered_json::array();
  for (const auto& d : ledger.days) {
    if (d.skipped) diag.push_back({{"date", format_date(d.date)}, {"reason", d.diagnostic}});
  }
  j["skipped"] = diag;
  return j.dump(2) + "\n";
}

}  // namespace flexsched
