// flexsched: command-line front end for the scheduling library.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flexsched/errors.hpp"
#include "flexsched/market_calendar.hpp"
#include "flexsched/prices.hpp"
#include "flexsched/render.hpp"
#include "flexsched/rolling_sim.hpp"
#include "flexsched/scheduler.hpp"
#include "flexsched/sensitivity.hpp"
#include "flexsched/solver.hpp"

namespace fs = flexsched;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string solver = "builtin";
  std::string solver_cmd;
  bool lenient = false;
  std::string calendar;
  double time_limit = 600;
  double gap = 1e-6;
  bool quiet = false;
};

// Objects the day/simulation commands share once the globals are parsed.
struct Context {
  std::unique_ptr<fs::SolverBackend> solver;
  std::optional<fs::MarketCalendar> calendar;
  fs::DayOptions day;
};

Context make_context(const Globals& g) {
  Context ctx;
  ctx.solver = fs::make_solver(g.solver, g.solver_cmd);
  if (!g.calendar.empty()) ctx.calendar = fs::MarketCalendar::from_csv(g.calendar);
  ctx.day.solver = ctx.solver.get();
  ctx.day.calendar = ctx.calendar ? &*ctx.calendar : nullptr;
  ctx.day.solve.time_limit_s = g.time_limit;
  ctx.day.solve.mip_gap_rel = g.gap;
  return ctx;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fs::IoError("cannot write " + path);
  out << text;
  if (!out) throw fs::IoError("write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fs::IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw fs::BadParams("--values: not a number '" + item + "'");
    }
  }
  return out;
}

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage industrial electricity scheduling: day-ahead baseline and intraday (SIDC) flexibility"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for synthetic prices")->default_val(1);
  app.add_option("--solver", g.solver, "builtin or external")->check(CLI::IsMember({"builtin", "external"}));
  app.add_option("--solver-cmd", g.solver_cmd, "External solver command with {lp} and {sol} placeholders");
  app.add_flag("--lenient", g.lenient, "Record infeasible days and continue");
  app.add_option("--calendar", g.calendar, "Session table CSV replacing the built-in one");
  app.add_option("--time-limit", g.time_limit, "Time limit per MILP solve in seconds")->default_val(600);
  app.add_option("--gap", g.gap, "Relative MIP gap")->default_val(1e-6);
  app.add_flag("-q,--quiet", g.quiet, "No progress output");

  // config
  auto* config_cmd = app.add_subcommand("config", "Show or validate a plant configuration");
  config_cmd->require_subcommand(1);
  std::string config_name;
  auto* config_show = config_cmd->add_subcommand("show", "Print a configuration in file format");
  config_show->add_option("config", config_name, "Builtin name (cement, steel) or file")->required();
  auto* config_validate = config_cmd->add_subcommand("validate", "Check a configuration");
  config_validate->add_option("config", config_name, "Builtin name (cement, steel) or file")->required();

  // shared options for the price-driven commands
  std::string prices_dir, date_text, out_csv, out_json, out_svg;
  int days = 0;
  bool no_state_carry = false;

  auto* day_cmd = app.add_subcommand("day", "Baseline and flexible schedule for one planning window");
  day_cmd->add_option("--config", config_name, "Builtin name or file")->required();
  day_cmd->add_option("--prices", prices_dir, "Directory of daily price files")->required();
  day_cmd->add_option("--date", date_text, "First day (D-1) of the window, YYYY-MM-DD")->required();
  day_cmd->add_option("--csv", out_csv, "Per-slot schedule CSV ('-' for stdout)");
  day_cmd->add_option("--json", out_json, "Summary JSON ('-' for stdout)");
  day_cmd->add_option("--svg", out_svg, "Week chart");

  auto* sim_cmd = app.add_subcommand("simulate", "Rolling simulation over consecutive days");
  sim_cmd->add_option("--config", config_name, "Builtin name or file")->required();
  sim_cmd->add_option("--prices", prices_dir, "Directory of daily price files")->required();
  sim_cmd->add_option("--from", date_text, "First simulated day, YYYY-MM-DD")->required();
  sim_cmd->add_option("--days", days, "Number of daily cycles")->default_val(365);
  sim_cmd->add_option("--csv", out_csv, "Ledger CSV ('-' for stdout)");
  sim_cmd->add_option("--json", out_json, "Ledger summary JSON ('-' for stdout)");
  sim_cmd->add_flag("--no-state-carry", no_state_carry, "Carry only storage between days, not machine state");

  std::string param;
  std::string values_text;
  int workers = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Single-parameter sensitivity sweep");
  sweep_cmd->add_option("--param", param, "demand_ratio, storage_ratio, min_on or min_off")->required();
  sweep_cmd->add_option("--values", values_text, "Comma-separated values (default grid when omitted)");
  sweep_cmd->add_option("--config", config_name, "Builtin name or file")->required();
  sweep_cmd->add_option("--prices", prices_dir, "Directory of daily price files")->required();
  sweep_cmd->add_option("--from", date_text, "First simulated day, YYYY-MM-DD")->required();
  sweep_cmd->add_option("--days", days, "Days per point")->default_val(28);
  sweep_cmd->add_option("--workers", workers, "Concurrent sweep points")->default_val(1);
  sweep_cmd->add_option("--csv", out_csv, "Result CSV ('-' for stdout)");
  sweep_cmd->add_option("--svg", out_svg, "Result chart");
  sweep_cmd->add_flag("--no-state-carry", no_state_carry, "Carry only storage between days");

  auto* synergy_cmd = app.add_subcommand("synergy", "Original vs combined settings (D/Pi 0.5, I_max/Pi 40, M_ON 1, M_OFF 1)");
  synergy_cmd->add_option("--config", config_name, "Builtin name or file")->required();
  synergy_cmd->add_option("--prices", prices_dir, "Directory of daily price files")->required();
  synergy_cmd->add_option("--from", date_text, "First simulated day, YYYY-MM-DD")->required();
  synergy_cmd->add_option("--days", days, "Days per run")->default_val(28);
  synergy_cmd->add_option("--workers", workers, "Run both cases concurrently when > 1")->default_val(1);
  synergy_cmd->add_option("--csv", out_csv, "Result CSV ('-' for stdout)");
  synergy_cmd->add_flag("--no-state-carry", no_state_carry, "Carry only storage between days");

  // prices
  auto* prices_cmd = app.add_subcommand("prices", "Price data tools");
  prices_cmd->require_subcommand(1);
  auto* ingest_cmd = prices_cmd->add_subcommand("ingest", "Validate a directory of daily price files");
  ingest_cmd->add_option("dir", prices_dir, "Directory")->required();

  std::string kind = "sinusoid", out_dir, source_dir;
  double flat_price = 50, mean = 60, amplitude = 20, noise = 0;
  auto* synth_cmd = prices_cmd->add_subcommand("synth", "Generate synthetic daily price files");
  synth_cmd->add_option("--kind", kind, "flat, sinusoid or match-moments")->default_val("sinusoid");
  synth_cmd->add_option("--from", date_text, "First date, YYYY-MM-DD")->required();
  synth_cmd->add_option("--days", days, "Number of days")->required();
  synth_cmd->add_option("--out", out_dir, "Output directory")->required();
  synth_cmd->add_option("--price", flat_price, "Flat price")->default_val(50);
  synth_cmd->add_option("--mean", mean, "Sinusoid mean")->default_val(60);
  synth_cmd->add_option("--amplitude", amplitude, "Sinusoid amplitude")->default_val(20);
  synth_cmd->add_option("--noise", noise, "Sinusoid Gaussian noise sd")->default_val(0);
  synth_cmd->add_option("--match-moments", source_dir, "Source price directory for match-moments");

  std::vector<std::string> da_files, sidc_files, fc_files;
  auto* omie_cmd = prices_cmd->add_subcommand("convert-omie", "Convert OMIE hourly marginal price files");
  omie_cmd->add_option("--day-ahead", da_files, "Day-ahead marginal price files")->required();
  omie_cmd->add_option("--sidc", sidc_files, "SIDC hourly price files in the same layout");
  omie_cmd->add_option("--forecast", fc_files, "Forecast files in the same layout");
  omie_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto* render_cmd = app.add_subcommand("render", "Week chart of one planning window");
  render_cmd->add_option("--config", config_name, "Builtin name or file")->required();
  render_cmd->add_option("--prices", prices_dir, "Directory of daily price files")->required();
  render_cmd->add_option("--date", date_text, "First day (D-1) of the window, YYYY-MM-DD")->required();
  render_cmd->add_option("--out", out_svg, "SVG file")->required();

  std::string lp_file, sol_file;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an LP-format model with the built-in engine");
  solve_cmd->add_option("model", lp_file, "LP file")->required();
  solve_cmd->add_option("--out", sol_file, "Solution file ('-' for stdout)")->default_val("-");
  bool relax = false;
  solve_cmd->add_flag("--relax", relax, "Solve the LP relaxation only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fs::exit_code::kValidation;
  }

  auto log = [&](const std::string& line) {
    if (!g.quiet) std::cerr << line << "\n";
  };

  try {
    if (config_cmd->parsed()) {
      const auto config = fs::load_config(config_name);
      if (config_show->parsed()) {
        std::cout << fs::config_to_text(config, config.name);
        return 0;
      }
      const auto v = fs::validate(config);
      for (const auto& x : v) std::cout << x.field << ": " << x.reason << "\n";
      if (!v.empty()) return fs::exit_code::kValidation;
      std::cout << config.name << ": valid\n";
      return 0;
    }

    if (prices_cmd->parsed()) {
      if (ingest_cmd->parsed()) {
        const auto store = fs::ingest_prices(prices_dir);
        std::cout << store.size() << " days, " << fs::format_date(store.first()) << " to "
                  << fs::format_date(store.last()) << "\n";
        return 0;
      }
      if (synth_cmd->parsed()) {
        fs::SynthParams p;
        p.price = flat_price;
        p.mean = mean;
        p.amplitude = amplitude;
        p.noise_sd = noise;
        p.seed = g.seed;
        fs::PriceStore source;
        const auto k = fs::parse_synth_kind(kind);
        if (k == fs::SynthKind::MatchMoments) {
          if (source_dir.empty()) throw fs::BadParams("match-moments needs --match-moments <dir>");
          source = fs::ingest_prices(source_dir);
          p.source = &source;
        }
        const auto store = fs::synth_prices(k, p, fs::parse_date(date_text), days);
        fs::export_prices(store, out_dir);
        std::cout << "wrote " << store.size() << " days to " << out_dir << "\n";
        return 0;
      }
      if (omie_cmd->parsed()) {
        auto paths = [](const std::vector<std::string>& v) { return std::vector<std::filesystem::path>(v.begin(), v.end()); };
        const auto store = fs::convert_omie(paths(da_files), paths(sidc_files), paths(fc_files));
        fs::export_prices(store, out_dir);
        std::cout << "wrote " << store.size() << " days to " << out_dir << "\n";
        return 0;
      }
    }

    if (solve_cmd->parsed()) {
      const auto model = fs::read_lp(read_text(lp_file));
      fs::SolveOptions opts;
      opts.time_limit_s = g.time_limit;
      opts.mip_gap_rel = g.gap;
      const auto sol = relax ? fs::solve_lp(model, opts) : fs::solve_mip(model, opts);
      write_text(sol_file, fs::write_solution(model, sol));
      log(std::string("status ") + fs::to_string(sol.status) + ", objective " + fmt(sol.objective, 6));
      switch (sol.status) {
        case fs::SolveStatus::Optimal:
        case fs::SolveStatus::FeasibleGapLimit: return 0;
        case fs::SolveStatus::Infeasible: return fs::exit_code::kInfeasible;
        default: return fs::exit_code::kSolverAbort;
      }
    }

    const auto config = fs::load_config(config_name);
    if (auto v = fs::validate(config); !v.empty()) {
      for (const auto& x : v) std::cerr << x.field << ": " << x.reason << "\n";
      return fs::exit_code::kValidation;
    }
    const auto store = fs::ingest_prices(prices_dir);
    const auto date = fs::parse_date(date_text);
    Context ctx = make_context(g);

    if (day_cmd->parsed() || render_cmd->parsed()) {
      const auto day = fs::run_day(config, store.price_set(date, config.horizon_slots), {}, ctx.day);
      if (day_cmd->parsed()) {
        std::cout << "window " << day.window.tau1 << ".." << day.window.tau2 << "  phi* " << fmt(day.phi_star)
                  << "  phi_dagger " << fmt(day.phi_dagger) << "  savings " << fmt(day.delta_phi)
                  << (day.accepted ? "" : "  (rejected)") << "\n";
        write_text(out_csv, fs::day_result_csv(day));
        write_text(out_json, fs::day_result_json(day));
      }
      if (!out_svg.empty()) fs::render_week(day, config, {}, out_svg);
      return 0;
    }

    fs::SimOptions sim;
    sim.day = ctx.day;
    sim.lenient = g.lenient;
    sim.carry_machine_state = !no_state_carry;

    if (sim_cmd->parsed()) {
      sim.on_day = [&](const fs::LedgerDay& d) {
        log(fs::format_date(d.date) + (d.skipped ? "  skipped: " + d.diagnostic
                                                  : "  phi* " + fmt(d.phi_star) + "  savings " + fmt(d.delta_phi)));
      };
      const auto ledger = fs::run_year(config, store, date, days, sim);
      std::cout << "annual phi* " << fmt(ledger.annual_phi_star) << " EUR, savings " << fmt(ledger.annual_savings)
                << " EUR (" << fmt(fs::savings_per_mw(ledger, config)) << " EUR/MW)\n";
      try {
        const auto n = fs::normalize(ledger, config);
        std::cout << "normalized cost " << fmt(n.cost_eur_mwh, 4) << " EUR/MWh, savings " << fmt(n.savings_eur_mwh, 4)
                  << " EUR/MWh\n";
      } catch (const fs::ZeroOperation& e) {
        std::cout << e.what() << "\n";
      }
      write_text(out_csv, fs::ledger_csv(ledger));
      write_text(out_json, fs::ledger_json(ledger, config));
      return 0;
    }

    fs::SweepOptions so;
    so.sim = sim;
    so.workers = workers;
    so.start = date;
    so.days = days;

    if (sweep_cmd->parsed()) {
      fs::SweepSpec spec;
      spec.parameter = fs::parse_sweep_parameter(param);
      spec.values = values_text.empty() ? fs::default_sweep_values(spec.parameter) : parse_values(values_text);
      spec.base_config = config.name;
      const auto result = fs::run_sweep(spec, config, store, so);
      for (const auto& p : result.points) {
        std::cout << param << " " << fmt_value(p.value) << ": "
                  << (p.feasible ? "cost " + fmt(p.normalized_cost, 4) + "  savings " + fmt(p.normalized_savings, 4)
                                 : "infeasible: " + p.diagnostic)
                  << "\n";
      }
      write_text(out_csv, fs::sweep_csv(result));
      write_text(out_svg, out_svg.empty() ? "" : fs::render_sweep_svg(result));
      return 0;
    }

    if (synergy_cmd->parsed()) {
      const auto r = fs::run_synergy(config, store, so);
      for (const auto& [name, p] : {std::pair{"original", r.before}, std::pair{"combined", r.after}}) {
        std::cout << name << ": "
                  << (p.feasible ? "cost " + fmt(p.normalized_cost, 4) + "  savings " + fmt(p.normalized_savings, 4)
                                 : "infeasible: " + p.diagnostic)
                  << "\n";
      }
      write_text(out_csv, fs::synergy_csv(r));
      return 0;
    }
  } catch (const fs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fs::exit_code::kSolverAbort;
  }
  return 0;
}
