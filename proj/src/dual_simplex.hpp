#pragma once

// Bounded-variable revised dual simplex. Rows are turned into equalities with
// one logical per row, A x - r = 0, so every variable carries its own bounds
// and the all-logical basis is always available as a fresh start.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <chrono>
#include <cstdint>
#include <vector>

#include "flexsched/linear_model.hpp"

namespace flexsched::detail {

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, Free };
enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct SimplexOptions {
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  double pivot_tol = 1e-9;
  int refactor_interval = 100;
  long iteration_limit = 5'000'000;
  // Values beyond this stand in for infinite bounds when a cost pushes a
  // variable toward an open side; ending there means unbounded.
  double artificial_bound = 1e8;
  // Consecutive zero-length dual steps before costs are perturbed.
  int perturb_after = 50;
};

class DualSimplex {
 public:
  explicit DualSimplex(const LinearModel& model, SimplexOptions opts = {});

  int num_structural() const { return n_; }
  int num_rows() const { return m_; }
  double lower(int j) const { return lo_[static_cast<std::size_t>(j)]; }
  double upper(int j) const { return up_[static_cast<std::size_t>(j)]; }
  void set_bounds(int j, double lo, double up);
  // solve() returns IterationLimit once this passes.
  void set_deadline(std::chrono::steady_clock::time_point deadline) { deadline_ = deadline; }

  LpStatus solve();

  double objective() const;
  // Lagrangian bound from the current reduced costs.
  double dual_bound() const;
  std::vector<double> values() const;
  double value(int j) const { return x_[static_cast<std::size_t>(j)]; }
  long iterations() const { return iterations_; }

  std::vector<VarStatus> basis() const { return status_; }
  void load_basis(const std::vector<VarStatus>& status);
  void reset_to_slack_basis();

 private:
  struct Eta {
    int row = 0;
    double pivot = 1;
    std::vector<int> index;
    std::vector<double> value;
  };
  struct Candidate {
    double ratio;
    int var;
    double magnitude;
  };

  std::size_t N() const { return static_cast<std::size_t>(n_ + m_); }
  bool boxed(std::size_t j) const;
  bool fixed(std::size_t j) const { return lo_[j] == up_[j]; }
  double nonbasic_value(std::size_t j) const;

  bool refactor();
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  void load_column(std::size_t j, Eigen::VectorXd& dense) const;
  void add_column(std::size_t j, double scale, Eigen::VectorXd& dense) const;
  void compute_primal();
  void compute_duals();
  bool repair_dual_feasibility();
  void compute_pivot_row(const Eigen::VectorXd& rho);
  int choose_leaving_row() const;
  bool has_artificial_at_bound() const;
  void ensure_factored();
  void perturb_costs();
  void restore_costs();

  SimplexOptions opts_;
  int n_ = 0;
  int m_ = 0;
  double objective_constant_ = 0;

  // Structural columns, column-major and row-major.
  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<int> row_start_, row_col_;
  std::vector<double> row_val_;

  std::vector<double> cost_, lo_, up_, x_, d_;
  std::vector<double> original_cost_;  // set while costs are perturbed
  std::vector<std::uint8_t> artificial_;  // 1 = lower, 2 = upper
  std::vector<VarStatus> status_;
  std::vector<int> head_;
  std::vector<double> dse_weight_;

  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  bool factored_ = false;
  int recoveries_ = 0;

  // Pivot row scratch.
  std::vector<double> alpha_;
  std::vector<int> alpha_touched_;
  std::vector<Candidate> candidates_;

  long iterations_ = 0;
  long degenerate_run_ = 0;
  bool bland_ = false;
  bool perturbed_ = false;
  std::chrono::steady_clock::time_point deadline_ = std::chrono::steady_clock::time_point::max();
};

}  // namespace flexsched::detail
