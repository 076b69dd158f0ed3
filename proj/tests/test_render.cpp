#include <gtest/gtest.h>

#include <filesystem>
#include <regex>
#include <vector>

#include "flexsched/errors.hpp"
#include "flexsched/render.hpp"

using namespace flexsched;

namespace {

// Tags open and close in order; enough to catch malformed output.
bool well_formed(const std::string& svg) {
  std::vector<std::string> stack;
  const std::regex tag(R"(<(/?)([a-zA-Z]+)[^>]*?(/?)>)");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[2] == "xml") continue;
    if (m[1] == "/") {
      if (stack.empty() || stack.back() != m[2]) return false;
      stack.pop_back();
    } else if (m[3] != "/") {
      stack.push_back(m[2]);
    }
  }
  return stack.empty();
}

std::size_t count(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (auto pos = text.find(what); pos != std::string::npos; pos = text.find(what, pos + 1)) ++n;
  return n;
}

PlantConfig two_day_plant() {
  PlantConfig c;
  c.name = "two_day";
  c.horizon_slots = 48;
  c.machines = {Machine{2, 10, 2, 1}};
  c.silos = {Silo{100, 10, 40, 0}};
  c.demand_tph.assign(48, 5);
  c.grid_limit_mw = 2;
  c.sidc_trade_limit_mw = 2;
  return c;
}

DayResult solved_day(SynthKind kind) {
  SynthParams p;
  p.noise_sd = 10;
  const auto prices = synth_prices(kind, p, parse_date("2023-01-01"), 2);
  return run_day(two_day_plant(), prices.price_set(parse_date("2023-01-01"), 48));
}

}  // namespace

TEST(RenderWeek, ThreePanelsAndWindowMarkers) {
  const auto day = solved_day(SynthKind::Sinusoid);
  const auto svg = render_week_svg(day, two_day_plant());
  EXPECT_TRUE(well_formed(svg));
  EXPECT_EQ(count(svg, "class=\"panel\""), 3u);
  EXPECT_GT(count(svg, "class=\"marker\" data-slot=\"24\""), 0u);
  EXPECT_GT(count(svg, "class=\"marker\" data-slot=\"48\""), 0u);
  EXPECT_GT(count(svg, "#d62728"), 0u);
  EXPECT_GT(count(svg, "#1f5fbf"), 0u);
}

TEST(RenderWeek, OverlaysWhenNoTrades) {
  const auto day = solved_day(SynthKind::Flat);
  ASSERT_EQ(day.delta_phi, 0);
  const auto svg = render_week_svg(day, two_day_plant());
  const std::regex path(R"re(<path class="(baseline|flexible)" d="([^"]*)")re");
  std::vector<std::string> base, flex;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), path); it != std::sregex_iterator(); ++it) {
    ((*it)[1] == "baseline" ? base : flex).push_back((*it)[2]);
  }
  ASSERT_EQ(base.size(), 2u);
  EXPECT_EQ(base, flex);
}

TEST(RenderWeek, PanelSelectionAndMarkersOff) {
  const auto day = solved_day(SynthKind::Sinusoid);
  ChartSpec spec;
  spec.panels = {Panel::Prices};
  spec.window_markers = false;
  const auto svg = render_week_svg(day, two_day_plant(), spec);
  EXPECT_TRUE(well_formed(svg));
  EXPECT_EQ(count(svg, "class=\"panel\""), 1u);
  EXPECT_EQ(count(svg, "class=\"marker\""), 0u);
}

TEST(RenderWeek, WritesFileOrThrows) {
  const auto day = solved_day(SynthKind::Sinusoid);
  const auto path = std::filesystem::temp_directory_path() / "flexsched_test_week.svg";
  render_week(day, two_day_plant(), {}, path);
  EXPECT_GT(std::filesystem::file_size(path), 1000u);
  // The parent is a regular file, so the directory cannot be created.
  EXPECT_THROW(render_week(day, two_day_plant(), {}, path / "week.svg"), IoError);
}

TEST(RenderSweep, TwoPanels) {
  SweepResult r;
  r.spec.parameter = SweepParameter::MinOn;
  r.spec.values = {1, 2, 3};
  for (double v : r.spec.values) {
    SweepPoint p;
    p.value = v;
    p.feasible = v != 2;
    p.normalized_cost = 50 + v;
    p.normalized_savings = 1 / v;
    r.points.push_back(p);
  }
  const auto svg = render_sweep_svg(r);
  EXPECT_TRUE(well_formed(svg));
  EXPECT_EQ(count(svg, "class=\"panel\""), 2u);
}
