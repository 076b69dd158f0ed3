#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace flexsched {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class Relation { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0;
  double upper = kInf;
};

struct Term {
  int var = 0;
  double coef = 0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0;
};

// Solver-agnostic MILP, always minimized.
class LinearModel {
 public:
  int add_variable(std::string name, VarKind kind, double lower, double upper);
  int add_continuous(std::string name, double lower, double upper) {
    return add_variable(std::move(name), VarKind::Continuous, lower, upper);
  }
  int add_binary(std::string name) { return add_variable(std::move(name), VarKind::Binary, 0, 1); }
  int add_constraint(std::string name, std::vector<Term> terms, Relation relation, double rhs);
  void add_objective(int var, double coef);

  std::vector<Variable>& variables() { return variables_; }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }
  void set_objective_constant(double c) { objective_constant_ = c; }

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int num_binaries() const;

  // Empty when well formed: declared variable references, [0,1] binaries,
  // finite coefficients, lower <= upper.
  std::vector<std::string> check() const;

  double evaluate_objective(std::span<const double> x) const;
  // Largest bound, row or integrality violation of x.
  double max_violation(std::span<const double> x) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<Term> objective_;
  double objective_constant_ = 0;
};

// CPLEX LP text format. A nonzero objective constant is written as a
// variable fixed at 1 named `obj_constant`.
std::string write_lp(const LinearModel& model);
LinearModel read_lp(const std::string& text);

}  // namespace flexsched
