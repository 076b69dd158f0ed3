#pragma once

// Dense two-phase tableau simplex with Bland's rule. Slow and simple; used
// only to cross-check the production LP engine on small models.

#include <vector>

#include "flexsched/linear_model.hpp"

namespace flexsched::testing {

enum class RefStatus { Optimal, Infeasible, Unbounded };

struct RefResult {
  RefStatus status = RefStatus::Infeasible;
  double objective = 0;
  std::vector<double> values;
};

// Binaries are relaxed to [0, 1].
RefResult reference_lp(const LinearModel& model);

}  // namespace flexsched::testing
