#include "flexsched/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <unordered_map>

#include "flexsched/errors.hpp"
#include "text_util.hpp"

namespace flexsched {

std::string write_solution(const LinearModel& model, const Solution& solution) {
  std::ostringstream out;
  out << "objective " << detail::format_double(solution.objective) << "\n";
  for (std::size_t j = 0; j < solution.values.size(); ++j) {
    out << model.variables()[j].name << " " << detail::format_double(solution.values[j]) << "\n";
  }
  return out.str();
}

Solution read_solution(const LinearModel& model, const std::string& text) {
  std::unordered_map<std::string, int> index;
  for (int j = 0; j < model.num_variables(); ++j) index.emplace(model.variables()[static_cast<std::size_t>(j)].name, j);

  Solution sol;
  sol.status = SolveStatus::Optimal;
  sol.values.assign(static_cast<std::size_t>(model.num_variables()), 0.0);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool has_objective = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream fields(t);
    std::string name, value;
    fields >> name >> value;
    if (value.empty()) throw ParseError("solution line " + std::to_string(line_no) + ": expected 'name value'");
    if (name == "objective") {
      sol.objective = detail::parse_double(value, "objective");
      has_objective = true;
      continue;
    }
    if (name == "status") {
      if (value == "infeasible") sol.status = SolveStatus::Infeasible;
      else if (value == "unbounded") sol.status = SolveStatus::Unbounded;
      else if (value == "aborted") sol.status = SolveStatus::Aborted;
      else if (value == "feasible") sol.status = SolveStatus::FeasibleGapLimit;
      continue;
    }
    if (name == "obj_constant") continue;
    const auto it = index.find(name);
    if (it == index.end()) throw ParseError("solution line " + std::to_string(line_no) + ": unknown variable '" + name + "'");
    sol.values[static_cast<std::size_t>(it->second)] = detail::parse_double(value, name);
  }
  if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::FeasibleGapLimit) {
    sol.values.clear();
    return sol;
  }
  for (std::size_t j = 0; j < sol.values.size(); ++j) {
    if (model.variables()[j].kind == VarKind::Binary) sol.values[j] = std::round(sol.values[j]);
  }
  if (!has_objective) sol.objective = model.evaluate_objective(sol.values);
  return sol;
}

ExternalSolver::ExternalSolver(std::string command_template, std::filesystem::path work_dir)
    : command_template_(std::move(command_template)), work_dir_(std::move(work_dir)) {
  if (command_template_.find("{lp}") == std::string::npos || command_template_.find("{sol}") == std::string::npos) {
    throw BadParams("external solver command must contain {lp} and {sol}");
  }
}

Solution ExternalSolver::solve(const LinearModel& model, const SolveOptions&, std::span<const double>) {
  const auto start = std::chrono::steady_clock::now();
  const long call = calls_++;
  const auto lp_path = work_dir_ / ("model_" + std::to_string(call) + ".lp");
  const auto sol_path = work_dir_ / ("model_" + std::to_string(call) + ".sol");
  detail::write_file(lp_path, write_lp(model));
  std::error_code ec;
  std::filesystem::remove(sol_path, ec);

  std::string cmd = command_template_;
  auto replace_all = [&cmd](const std::string& key, const std::string& value) {
    for (auto pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + value.size())) {
      cmd.replace(pos, key.size(), value);
    }
  };
  replace_all("{lp}", lp_path.string());
  replace_all("{sol}", sol_path.string());
  const int rc = std::system(cmd.c_str());

  Solution sol;
  if (rc != 0 || !std::filesystem::exists(sol_path)) {
    sol.status = SolveStatus::Aborted;
    sol.message = "external solver failed (exit " + std::to_string(rc) + ")";
  } else {
    sol = read_solution(model, detail::read_file(sol_path));
    if (sol.has_values()) sol.stats.dual_bound = sol.objective;
  }
  sol.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

std::unique_ptr<SolverBackend> make_solver(const std::string& kind, const std::string& external_command) {
  if (kind == "builtin") return std::make_unique<BuiltinSolver>();
  if (kind == "external") {
    if (external_command.empty()) throw BadParams("--solver external needs --solver-cmd");
    return std::make_unique<ExternalSolver>(external_command, std::filesystem::temp_directory_path() / "flexsched");
  }
  throw BadParams("unknown solver '" + kind + "' (builtin|external)");
}

}  // namespace flexsched
