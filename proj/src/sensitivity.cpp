#include "flexsched/sensitivity.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "flexsched/errors.hpp"
#include "text_util.hpp"

namespace flexsched {

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "demand_ratio") return SweepParameter::DemandRatio;
  if (name == "storage_ratio") return SweepParameter::StorageRatio;
  if (name == "min_on") return SweepParameter::MinOn;
  if (name == "min_off") return SweepParameter::MinOff;
  throw BadParams("unknown sweep parameter '" + name + "' (demand_ratio, storage_ratio, min_on, min_off)");
}

const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::DemandRatio: return "demand_ratio";
    case SweepParameter::StorageRatio: return "storage_ratio";
    case SweepParameter::MinOn: return "min_on";
    case SweepParameter::MinOff: return "min_off";
  }
  return "?";
}

std::vector<double> default_sweep_values(SweepParameter p) {
  switch (p) {
    case SweepParameter::DemandRatio: return {0.3, 0.4, 0.484, 0.5, 0.6, 0.667, 0.7, 0.8, 0.9};
    case SweepParameter::StorageRatio: return {8, 10, 20, 30, 40, 41.67, 50, 60, 70};
    case SweepParameter::MinOn:
    case SweepParameter::MinOff: return {1, 2, 3, 4, 5, 6, 7, 8};
  }
  return {};
}

void validate_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw BadParams("sweep needs at least one value");
  for (double v : spec.values) {
    const std::string at = std::string(to_string(spec.parameter)) + " value " + detail::format_double(v);
    if (!std::isfinite(v)) throw BadParams(at + " is not finite");
    switch (spec.parameter) {
      case SweepParameter::DemandRatio:
        if (!(v > 0 && v <= 0.9)) throw BadParams(at + " outside (0, 0.9]");
        break;
      case SweepParameter::StorageRatio:
        if (v < 8) throw BadParams(at + " below 8");
        break;
      case SweepParameter::MinOn:
        if (v != std::floor(v) || v < 1) throw BadParams(at + " must be an integer >= 1");
        break;
      case SweepParameter::MinOff:
        if (v != std::floor(v) || v < 0) throw BadParams(at + " must be an integer >= 0");
        break;
    }
  }
}

PlantConfig apply_parameter(const PlantConfig& base, SweepParameter p, double value) {
  PlantConfig c = base;
  double pi = 0;
  for (const auto& m : c.machines) pi += m.production_tph;
  switch (p) {
    case SweepParameter::DemandRatio:
      c.demand_tph.assign(static_cast<std::size_t>(c.horizon_slots), value * pi);
      break;
    case SweepParameter::StorageRatio: {
      double cap = 0;
      for (const auto& s : c.silos) cap += s.capacity_t;
      const double scale = value * pi / cap;
      for (auto& s : c.silos) {
        s.capacity_t *= scale;
        s.floor_t *= scale;
        s.initial_t *= scale;
      }
      break;
    }
    case SweepParameter::MinOn:
      for (auto& m : c.machines) m.min_on_slots = static_cast<int>(value);
      break;
    case SweepParameter::MinOff:
      for (auto& m : c.machines) m.min_off_slots = static_cast<int>(value);
      break;
  }
  return c;
}

namespace {

SweepPoint simulate_point(const PlantConfig& config, double value, const PriceStore& prices,
                          const SweepOptions& options) {
  SweepPoint point;
  point.value = value;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    SimOptions sim = options.sim;
    sim.on_day = nullptr;
    const auto ledger = run_year(config, prices, options.start, options.days, sim);
    const auto n = normalize(ledger, config);
    point.feasible = true;
    point.normalized_cost = n.cost_eur_mwh;
    point.normalized_savings = n.savings_eur_mwh;
    point.savings_per_mw = savings_per_mw(ledger, config);
    for (const auto& d : ledger.days) point.skipped_days += d.skipped ? 1 : 0;
  } catch (const MissingPrices&) {
    throw;  // the whole sweep shares one price set
  } catch (const Error& e) {
    point.feasible = false;
    point.diagnostic = e.what();
  }
  point.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return point;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const PlantConfig& base, const PriceStore& prices,
                      const SweepOptions& options) {
  validate_sweep(spec);
  SweepResult result;
  result.spec = spec;
  result.points.resize(spec.values.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < spec.values.size(); i = next++) {
      try {
        const auto config = apply_parameter(base, spec.parameter, spec.values[i]);
        result.points[i] = simulate_point(config, spec.values[i], prices, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(spec.values.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return result;
}

PlantConfig synergy_config(const PlantConfig& base) {
  PlantConfig c = apply_parameter(base, SweepParameter::DemandRatio, 0.5);
  c = apply_parameter(c, SweepParameter::StorageRatio, 40);
  c = apply_parameter(c, SweepParameter::MinOn, 1);
  c = apply_parameter(c, SweepParameter::MinOff, 1);
  return c;
}

SynergyResult run_synergy(const PlantConfig& base, const PriceStore& prices, const SweepOptions& options) {
  SynergyResult r;
  const PlantConfig combined = synergy_config(base);
  if (options.workers > 1) {
    std::thread t([&] { r.after = simulate_point(combined, 1, prices, options); });
    r.before = simulate_point(base, 0, prices, options);
    t.join();
  } else {
    r.before = simulate_point(base, 0, prices, options);
    r.after = simulate_point(combined, 1, prices, options);
  }
  return r;
}

namespace {

void point_row(std::ostringstream& out, const SweepPoint& p) {
  out << (p.feasible ? 1 : 0) << "," << detail::fixed(p.normalized_cost, 6) << ","
      << detail::fixed(p.normalized_savings, 6) << "," << detail::fixed(p.savings_per_mw, 6) << "," << p.skipped_days;
}

}  // namespace

// Runtimes are left out so repeated runs give identical files.
std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << to_string(result.spec.parameter)
      << ",feasible,normalized_cost_eur_mwh,normalized_savings_eur_mwh,savings_eur_per_mw,skipped_days\n";
  for (const auto& p : result.points) {
    out << detail::format_double(p.value) << ",";
    point_row(out, p);
    out << "\n";
  }
  return out.str();
}

std::string synergy_csv(const SynergyResult& result) {
  std::ostringstream out;
  out << "case,feasible,normalized_cost_eur_mwh,normalized_savings_eur_mwh,savings_eur_per_mw,skipped_days\n";
  out << "original,";
  point_row(out, result.before);
  out << "\ncombined,";
  point_row(out, result.after);
  out << "\n";
  return out.str();
}

}  // namespace flexsched
