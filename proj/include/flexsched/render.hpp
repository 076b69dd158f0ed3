#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flexsched/plant.hpp"
#include "flexsched/scheduler.hpp"
#include "flexsched/sensitivity.hpp"

namespace flexsched {

enum class Panel { Prices, Schedule, Storage };

struct SeriesStyle {
  std::string color;
  double width = 1.5;
  std::string dash;  // SVG stroke-dasharray, empty for solid
};

struct ChartSpec {
  std::vector<Panel> panels = {Panel::Prices, Panel::Schedule, Panel::Storage};
  SeriesStyle day_ahead{"#8c8c8c", 1.5, ""};
  SeriesStyle sidc{"#1f5fbf", 1.5, ""};
  SeriesStyle baseline{"#000000", 2.0, ""};
  SeriesStyle flexible{"#d62728", 1.2, ""};
  bool window_markers = true;  // "O" at tau1, "C" at tau2
  int width_px = 960;
  int panel_height_px = 220;
};

// One planning window (192 slots by default): prices with the SIDC inside
// the window, baseline vs flexible grid power, and storage per silo.
std::string render_week_svg(const DayResult& day, const PlantConfig& config, const ChartSpec& spec = {});
// Throws IoError.
void render_week(const DayResult& day, const PlantConfig& config, const ChartSpec& spec,
                 const std::filesystem::path& out);

// Normalized cost and savings against the swept value.
std::string render_sweep_svg(const SweepResult& result);

}  // namespace flexsched
