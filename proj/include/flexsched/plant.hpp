#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flexsched {

// A flexible machine: on/off with fixed electric load and output rate.
struct Machine {
  double power_mw = 0;        // P_k
  double production_tph = 0;  // Pi_k
  int min_on_slots = 1;       // M_ON
  int min_off_slots = 0;      // M_OFF

  bool operator==(const Machine&) const = default;
};

struct Silo {
  double capacity_t = 0;    // I_max
  double floor_t = 0;       // I_min
  double initial_t = 0;     // I_0
  double storage_cost = 0;  // pi_S, EUR per tonne-hour

  bool operator==(const Silo&) const = default;
};

struct Battery {
  double capacity_mwh = 0;
  double depth_of_discharge = 0;
  double soc0_mwh = 0;
  double max_charge_mw = 0;
  double max_discharge_mw = 0;
  double cycle_cost = 0;  // pi_U, EUR/MWh charged or discharged

  bool present() const { return capacity_mwh > 0; }
  bool operator==(const Battery&) const = default;
};

struct PlantConfig {
  std::string name;
  std::vector<Machine> machines;
  std::vector<Silo> silos;
  Battery battery;
  std::vector<double> pv_profile_mw;  // per slot; empty means no PV
  std::vector<double> demand_tph;     // per slot D_t
  double grid_limit_mw = 0;           // P_b_max
  double sidc_trade_limit_mw = 0;     // LC1
  double min_revenue_eur = 0;         // R, applied after the flexible solve
  int h_sidc = 22;
  int horizon_slots = 192;
  double slot_hours = 1.0;
  // Require one slot of demand in storage (I_t >= D_t * dt) instead of I_t >= 0.
  bool demand_cover_floor = false;

  double pv_at(int slot0) const {
    return pv_profile_mw.empty() ? 0.0 : pv_profile_mw[static_cast<std::size_t>(slot0)];
  }
  double total_power_mw() const;
  bool operator==(const PlantConfig&) const = default;
};

struct Violation {
  std::string field;
  std::string reason;

  bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate(const PlantConfig& config);

// Cumulative-demand pre-scan: from the given storage (defaults to each silo's
// I_0), running every machine flat out must keep total storage above the
// floors at every slot. Returns the reason when it cannot.
std::optional<std::string> prescan_feasibility(const PlantConfig& config,
                                               const std::vector<double>* initial_storage = nullptr);

// "cement" or "steel" case-study parameterization. Throws UnknownConfig.
PlantConfig builtin_config(std::string_view name);
std::vector<std::string> builtin_config_names();

// Key-value text: one `key = value` per line. Non-flat demand/PV series go to
// CSV sidecars (`slot,value`) named in demand_file / pv_file.
std::string config_to_text(const PlantConfig& config, const std::string& sidecar_stem = "");
void write_config(const PlantConfig& config, const std::filesystem::path& path);
PlantConfig read_config(const std::filesystem::path& path);
PlantConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

// A builtin name or a path to a config file.
PlantConfig load_config(const std::string& name_or_path);

}  // namespace flexsched
