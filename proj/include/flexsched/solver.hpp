#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "flexsched/linear_model.hpp"

namespace flexsched {

enum class Branching { MostFractional, FirstIndex };

struct SolveOptions {
  double mip_gap_rel = 1e-6;
  double time_limit_s = 3600;
  Branching branching = Branching::MostFractional;
  long node_limit = 1'000'000;
  double integrality_tol = 1e-7;
  double feasibility_tol = 1e-7;
};

enum class SolveStatus { Optimal, FeasibleGapLimit, Infeasible, Unbounded, Aborted };

const char* to_string(SolveStatus status);

struct SolveStats {
  long nodes = 0;
  long simplex_iterations = 0;
  double wall_seconds = 0;
  // Lower bound on the optimum: the LP dual bound for solve_lp, the best open
  // node bound for solve_mip.
  double dual_bound = 0;
};

struct Solution {
  SolveStatus status = SolveStatus::Aborted;
  std::vector<double> values;  // one per model variable; empty when none found
  double objective = 0;
  double gap = 0;  // (objective - dual_bound) / max(1, |objective|)
  SolveStats stats;
  std::string message;

  bool has_values() const { return !values.empty(); }
};

// LP relaxation (binaries relaxed to [0,1]). Throws NumericalBreakdown.
Solution solve_lp(const LinearModel& model, const SolveOptions& opts = {});

// Branch and bound over the binaries. `incumbent`, when given and feasible,
// seeds the search; a limit stop reports FeasibleGapLimit with the best
// incumbent, or Aborted when there is none.
Solution solve_mip(const LinearModel& model, const SolveOptions& opts = {},
                   std::span<const double> incumbent = {});

// Solve backend seam used by the scheduler.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual Solution solve(const LinearModel& model, const SolveOptions& opts,
                         std::span<const double> incumbent) = 0;
  virtual std::string name() const = 0;
};

class BuiltinSolver final : public SolverBackend {
 public:
  Solution solve(const LinearModel& model, const SolveOptions& opts, std::span<const double> incumbent) override {
    return solve_mip(model, opts, incumbent);
  }
  std::string name() const override { return "builtin"; }
};

// Writes the model as an LP file, runs a shell command template and reads
// the solution file back. `{lp}` and `{sol}` in the template are replaced by
// the file paths. Solution file: optional `objective <value>` header, then
// `name value` lines; names not listed are taken as 0.
class ExternalSolver final : public SolverBackend {
 public:
  ExternalSolver(std::string command_template, std::filesystem::path work_dir);
  Solution solve(const LinearModel& model, const SolveOptions& opts, std::span<const double> incumbent) override;
  std::string name() const override { return "external"; }

 private:
  std::string command_template_;
  std::filesystem::path work_dir_;
  long calls_ = 0;
};

std::string write_solution(const LinearModel& model, const Solution& solution);
// Values in model order; throws ParseError for unknown names.
Solution read_solution(const LinearModel& model, const std::string& text);

std::unique_ptr<SolverBackend> make_solver(const std::string& kind, const std::string& external_command = {});

}  // namespace flexsched
