#include "flexsched/plant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "flexsched/errors.hpp"
#include "text_util.hpp"

namespace flexsched {

double PlantConfig::total_power_mw() const {
  double sum = 0;
  for (const auto& m : machines) sum += m.power_mw;
  return sum;
}

namespace {

bool finite(double v) { return std::isfinite(v); }

std::string idx(const char* what, std::size_t i) { return std::string(what) + "[" + std::to_string(i) + "]"; }

}  // namespace

std::vector<Violation> validate(const PlantConfig& c) {
  std::vector<Violation> out;
  auto fail = [&out](std::string field, std::string reason) {
    out.push_back({std::move(field), std::move(reason)});
  };

  if (c.horizon_slots < 2) fail("horizon_slots", "must be at least 2");
  if (!(c.slot_hours > 0) || !finite(c.slot_hours)) fail("slot_hours", "must be positive");
  if (c.h_sidc < 1 || c.h_sidc > 24) fail("h_sidc", "must be a slot of day D-1 (1..24)");
  if (!(c.grid_limit_mw >= 0) || !finite(c.grid_limit_mw)) fail("grid_limit_mw", "must be >= 0");
  if (!(c.sidc_trade_limit_mw >= 0) || !finite(c.sidc_trade_limit_mw)) {
    fail("sidc_trade_limit_mw", "must be >= 0");
  }
  if (!(c.min_revenue_eur >= 0) || !finite(c.min_revenue_eur)) fail("min_revenue_eur", "must be >= 0");

  if (c.machines.empty()) fail("machines", "at least one machine is required");
  for (std::size_t k = 0; k < c.machines.size(); ++k) {
    const auto& m = c.machines[k];
    if (!(m.power_mw > 0) || !finite(m.power_mw)) fail(idx("machines", k) + ".power_mw", "must be > 0");
    if (!(m.production_tph > 0) || !finite(m.production_tph)) {
      fail(idx("machines", k) + ".production_tph", "must be > 0");
    }
    if (m.min_on_slots < 1) fail(idx("machines", k) + ".min_on_slots", "must be >= 1");
    if (m.min_off_slots < 0) fail(idx("machines", k) + ".min_off_slots", "must be >= 0");
  }

  if (c.silos.empty()) fail("silos", "at least one silo is required");
  for (std::size_t i = 0; i < c.silos.size(); ++i) {
    const auto& s = c.silos[i];
    const std::string f = idx("silos", i);
    if (!finite(s.capacity_t) || !finite(s.floor_t) || !finite(s.initial_t)) {
      fail(f, "levels must be finite");
      continue;
    }
    if (s.floor_t < 0) fail(f + ".floor_t", "must be >= 0");
    if (s.floor_t > s.capacity_t) fail(f + ".floor_t", "exceeds capacity_t");
    if (s.initial_t < s.floor_t) fail(f + ".initial_t", "below floor_t");
    if (s.initial_t > s.capacity_t) fail(f + ".initial_t", "above capacity_t");
    if (!(s.storage_cost >= 0) || !finite(s.storage_cost)) fail(f + ".storage_cost", "must be >= 0");
  }

  const auto& b = c.battery;
  for (auto [name, v] : {std::pair{"capacity_mwh", b.capacity_mwh}, {"depth_of_discharge", b.depth_of_discharge},
                         {"soc0_mwh", b.soc0_mwh}, {"max_charge_mw", b.max_charge_mw},
                         {"max_discharge_mw", b.max_discharge_mw}, {"cycle_cost", b.cycle_cost}}) {
    if (!(v >= 0) || !finite(v)) fail(std::string("battery.") + name, "must be finite and >= 0");
  }
  if (b.depth_of_discharge > 1) fail("battery.depth_of_discharge", "must be within [0, 1]");
  if (b.present()) {
    const double lo = b.capacity_mwh * (1 - b.depth_of_discharge);
    const double hi = b.capacity_mwh * b.depth_of_discharge;
    if (b.soc0_mwh < lo - 1e-9 || b.soc0_mwh > hi + 1e-9) {
      fail("battery.soc0_mwh", "must lie within [C_max(1-DoD), C_max*DoD]");
    }
  }

  const auto n = static_cast<std::size_t>(std::max(c.horizon_slots, 0));
  if (c.demand_tph.size() != n) {
    fail("demand_tph", "needs one value per slot (" + std::to_string(n) + ")");
  } else {
    for (std::size_t t = 0; t < n; ++t) {
      if (!(c.demand_tph[t] >= 0) || !finite(c.demand_tph[t])) {
        fail(idx("demand_tph", t), "must be finite and >= 0");
        break;
      }
    }
  }
  if (!c.pv_profile_mw.empty()) {
    if (c.pv_profile_mw.size() != n) {
      fail("pv_profile_mw", "needs one value per slot (" + std::to_string(n) + ") or none");
    } else {
      for (std::size_t t = 0; t < n; ++t) {
        if (!(c.pv_profile_mw[t] >= 0) || !finite(c.pv_profile_mw[t])) {
          fail(idx("pv_profile_mw", t), "must be finite and >= 0");
          break;
        }
      }
    }
  }

  if (!out.empty()) return out;

  double min_pv = 0;
  if (!c.pv_profile_mw.empty()) min_pv = *std::min_element(c.pv_profile_mw.begin(), c.pv_profile_mw.end());
  if (c.grid_limit_mw + min_pv + b.max_discharge_mw < c.total_power_mw() - 1e-9) {
    fail("grid_limit_mw", "grid, PV and battery cannot power all machines at once");
  }
  if (auto reason = prescan_feasibility(c)) fail("demand_tph", *reason);
  return out;
}

std::optional<std::string> prescan_feasibility(const PlantConfig& c, const std::vector<double>* initial) {
  double max_rate = 0;
  for (const auto& m : c.machines) max_rate += m.production_tph;
  double stock = 0;
  double floors = 0;
  for (std::size_t i = 0; i < c.silos.size(); ++i) {
    stock += initial ? (*initial)[i] : c.silos[i].initial_t;
    floors += c.silos[i].floor_t;
  }
  const int n = std::min(c.horizon_slots, static_cast<int>(c.demand_tph.size()));
  for (int t = 0; t < n; ++t) {
    const double demand = c.demand_tph[static_cast<std::size_t>(t)];
    stock += (max_rate - demand) * c.slot_hours;
    const double required = std::max(floors, c.demand_cover_floor ? demand * c.slot_hours : 0.0);
    if (stock < required - 1e-6) {
      std::ostringstream msg;
      msg << "cumulative demand exceeds storage plus full production by slot " << (t + 1);
      return msg.str();
    }
  }
  return std::nullopt;
}

PlantConfig builtin_config(std::string_view name) {
  PlantConfig c;
  c.name = std::string(name);
  c.horizon_slots = 192;
  c.slot_hours = 1.0;
  c.h_sidc = 22;
  c.min_revenue_eur = 0;
  double demand = 0;
  if (name == "cement") {
    c.machines = {Machine{6, 360, 6, 3}};
    c.silos = {Silo{15000, 9000, 9000, 0}};
    demand = 240;
  } else if (name == "steel") {
    c.machines = {Machine{63, 172, 7, 1}};
    c.silos = {Silo{28000, 0, 0, 0}};
    demand = 83.33;
  } else {
    throw UnknownConfig("unknown builtin config '" + std::string(name) + "' (expected cement or steel)");
  }
  c.grid_limit_mw = c.total_power_mw();
  c.sidc_trade_limit_mw = c.grid_limit_mw;
  c.demand_tph.assign(static_cast<std::size_t>(c.horizon_slots), demand);
  return c;
}

std::vector<std::string> builtin_config_names() { return {"cement", "steel"}; }

// --- text format -----------------------------------------------------------

namespace {

bool is_flat(const std::vector<double>& v) {
  return !v.empty() && std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

std::string series_csv(const std::vector<double>& v) {
  std::ostringstream out;
  out << "slot,value\n";
  for (std::size_t t = 0; t < v.size(); ++t) out << (t + 1) << ',' << detail::format_double(v[t]) << '\n';
  return out.str();
}

std::vector<double> parse_series_csv(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split(line, ',');
    if (fields.size() == 2 && fields[0] == "slot") continue;
    if (fields.size() != 2) throw ParseError(what + " line " + std::to_string(line_no) + ": expected slot,value");
    const int slot = detail::parse_int(fields[0], what + " slot");
    if (slot != static_cast<int>(out.size()) + 1) {
      throw ParseError(what + " line " + std::to_string(line_no) + ": slots must be consecutive from 1");
    }
    out.push_back(detail::parse_double(fields[1], what));
  }
  return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError(key + ": expected true/false, got '" + v + "'");
}

}  // namespace

std::string config_to_text(const PlantConfig& c, const std::string& stem) {
  std::ostringstream out;
  auto put = [&out](const std::string& key, const std::string& value) { out << key << " = " << value << '\n'; };
  auto num = [](double v) { return detail::format_double(v); };
  out << "# flexsched plant config\n";
  put("name", c.name);
  put("horizon_slots", std::to_string(c.horizon_slots));
  put("slot_hours", num(c.slot_hours));
  put("h_sidc", std::to_string(c.h_sidc));
  put("grid_limit_mw", num(c.grid_limit_mw));
  put("sidc_trade_limit_mw", num(c.sidc_trade_limit_mw));
  put("min_revenue_eur", num(c.min_revenue_eur));
  put("demand_cover_floor", c.demand_cover_floor ? "true" : "false");
  for (std::size_t k = 0; k < c.machines.size(); ++k) {
    const auto p = "machine." + std::to_string(k + 1) + ".";
    const auto& m = c.machines[k];
    put(p + "power_mw", num(m.power_mw));
    put(p + "production_tph", num(m.production_tph));
    put(p + "min_on_slots", std::to_string(m.min_on_slots));
    put(p + "min_off_slots", std::to_string(m.min_off_slots));
  }
  for (std::size_t i = 0; i < c.silos.size(); ++i) {
    const auto p = "silo." + std::to_string(i + 1) + ".";
    const auto& s = c.silos[i];
    put(p + "capacity_t", num(s.capacity_t));
    put(p + "floor_t", num(s.floor_t));
    put(p + "initial_t", num(s.initial_t));
    put(p + "storage_cost", num(s.storage_cost));
  }
  const auto& b = c.battery;
  put("battery.capacity_mwh", num(b.capacity_mwh));
  put("battery.depth_of_discharge", num(b.depth_of_discharge));
  put("battery.soc0_mwh", num(b.soc0_mwh));
  put("battery.max_charge_mw", num(b.max_charge_mw));
  put("battery.max_discharge_mw", num(b.max_discharge_mw));
  put("battery.cycle_cost", num(b.cycle_cost));
  if (is_flat(c.demand_tph) && static_cast<int>(c.demand_tph.size()) == c.horizon_slots) {
    put("demand_tph", num(c.demand_tph.front()));
  } else {
    put("demand_file", stem + ".demand.csv");
  }
  if (c.pv_profile_mw.empty()) {
    put("pv_mw", "none");
  } else if (is_flat(c.pv_profile_mw) && static_cast<int>(c.pv_profile_mw.size()) == c.horizon_slots) {
    put("pv_mw", num(c.pv_profile_mw.front()));
  } else {
    put("pv_file", stem + ".pv.csv");
  }
  return out.str();
}

void write_config(const PlantConfig& c, const std::filesystem::path& path) {
  const std::string stem = path.stem().string();
  detail::write_file(path, config_to_text(c, stem));
  const auto dir = path.parent_path();
  if (!(is_flat(c.demand_tph) && static_cast<int>(c.demand_tph.size()) == c.horizon_slots)) {
    detail::write_file(dir / (stem + ".demand.csv"), series_csv(c.demand_tph));
  }
  if (!c.pv_profile_mw.empty() &&
      !(is_flat(c.pv_profile_mw) && static_cast<int>(c.pv_profile_mw.size()) == c.horizon_slots)) {
    detail::write_file(dir / (stem + ".pv.csv"), series_csv(c.pv_profile_mw));
  }
}

PlantConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  PlantConfig c;
  c.machines.clear();
  c.silos.clear();
  std::map<int, Machine> machines;
  std::map<int, Silo> silos;
  std::optional<double> flat_demand;
  std::optional<double> flat_pv;
  std::optional<std::vector<double>> demand_series;
  std::optional<std::vector<double>> pv_series;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    auto real = [&] { return detail::parse_double(value, key); };
    auto integer = [&] { return detail::parse_int(value, key); };

    if (key == "name") {
      c.name = value;
    } else if (key == "horizon_slots") {
      c.horizon_slots = integer();
    } else if (key == "slot_hours") {
      c.slot_hours = real();
    } else if (key == "h_sidc") {
      c.h_sidc = integer();
    } else if (key == "grid_limit_mw") {
      c.grid_limit_mw = real();
    } else if (key == "sidc_trade_limit_mw") {
      c.sidc_trade_limit_mw = real();
    } else if (key == "min_revenue_eur") {
      c.min_revenue_eur = real();
    } else if (key == "demand_cover_floor") {
      c.demand_cover_floor = parse_bool(value, key);
    } else if (key == "demand_tph") {
      flat_demand = real();
    } else if (key == "demand_file") {
      demand_series = parse_series_csv(detail::read_file(base_dir / value), value);
    } else if (key == "pv_mw") {
      if (value != "none") flat_pv = real();
    } else if (key == "pv_file") {
      pv_series = parse_series_csv(detail::read_file(base_dir / value), value);
    } else if (key.rfind("battery.", 0) == 0) {
      const std::string field = key.substr(8);
      auto& b = c.battery;
      if (field == "capacity_mwh") b.capacity_mwh = real();
      else if (field == "depth_of_discharge") b.depth_of_discharge = real();
      else if (field == "soc0_mwh") b.soc0_mwh = real();
      else if (field == "max_charge_mw") b.max_charge_mw = real();
      else if (field == "max_discharge_mw") b.max_discharge_mw = real();
      else if (field == "cycle_cost") b.cycle_cost = real();
      else throw ParseError("config line " + std::to_string(line_no) + ": unknown key " + key);
    } else if (key.rfind("machine.", 0) == 0 || key.rfind("silo.", 0) == 0) {
      const auto parts = detail::split(key, '.');
      if (parts.size() != 3) throw ParseError("config line " + std::to_string(line_no) + ": bad key " + key);
      const int n = detail::parse_int(parts[1], key);
      if (n < 1) throw ParseError("config line " + std::to_string(line_no) + ": indices start at 1");
      const std::string& field = parts[2];
      if (parts[0] == "machine") {
        auto& m = machines[n];
        if (field == "power_mw") m.power_mw = real();
        else if (field == "production_tph") m.production_tph = real();
        else if (field == "min_on_slots") m.min_on_slots = integer();
        else if (field == "min_off_slots") m.min_off_slots = integer();
        else throw ParseError("config line " + std::to_string(line_no) + ": unknown key " + key);
      } else {
        auto& s = silos[n];
        if (field == "capacity_t") s.capacity_t = real();
        else if (field == "floor_t") s.floor_t = real();
        else if (field == "initial_t") s.initial_t = real();
        else if (field == "storage_cost") s.storage_cost = real();
        else throw ParseError("config line " + std::to_string(line_no) + ": unknown key " + key);
      }
    } else {
      throw ParseError("config line " + std::to_string(line_no) + ": unknown key " + key);
    }
  }

  int expect = 1;
  for (auto& [n, m] : machines) {
    if (n != expect++) throw ParseError("config: machine indices must be consecutive from 1");
    c.machines.push_back(m);
  }
  expect = 1;
  for (auto& [n, s] : silos) {
    if (n != expect++) throw ParseError("config: silo indices must be consecutive from 1");
    c.silos.push_back(s);
  }
  const auto n = static_cast<std::size_t>(std::max(c.horizon_slots, 0));
  if (demand_series) c.demand_tph = *demand_series;
  else if (flat_demand) c.demand_tph.assign(n, *flat_demand);
  if (pv_series) c.pv_profile_mw = *pv_series;
  else if (flat_pv) c.pv_profile_mw.assign(n, *flat_pv);
  return c;
}

PlantConfig read_config(const std::filesystem::path& path) {
  return parse_config(detail::read_file(path), path.parent_path());
}

PlantConfig load_config(const std::string& name_or_path) {
  for (const auto& n : builtin_config_names()) {
    if (n == name_or_path) return builtin_config(n);
  }
  if (std::filesystem::exists(name_or_path)) return read_config(name_or_path);
  throw UnknownConfig("unknown config '" + name_or_path + "': not a builtin name or an existing file");
}

}  // namespace flexsched
