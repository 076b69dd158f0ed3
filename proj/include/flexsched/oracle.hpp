#pragma once

#include <optional>
#include <span>
#include <vector>

#include "flexsched/model_builder.hpp"

namespace flexsched {

struct OracleResult {
  bool feasible = false;
  double cost = kInf;
  std::vector<int> pattern;  // machine state per slot of the best pattern
};

// Exhaustive optimum for a tiny plant: one machine, one silo, no battery, at
// most 12 slots. Every on/off pattern is checked for run lengths and storage bounds;
// the continuous part is solved per slot in closed form over the (P_b, P_m)
// box. With a window, P_m is free in [-LC1, LC1] inside it and `pins` fixes
// P_b on slots 1..tau2. Throws TooLarge and BadParams.
OracleResult oracle_enumerate(const PlantConfig& config, const PriceSet& prices, const CarryState& carry = {},
                              std::optional<TradingWindow> window = std::nullopt,
                              std::span<const double> pins = {});

}  // namespace flexsched
