#include "flexsched/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flexsched/errors.hpp"
#include "text_util.hpp"

namespace flexsched {

namespace {

constexpr double kLeft = 70, kRight = 20, kTop = 28, kBottom = 34;

std::string num(double v) { return detail::fixed(v, 2); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Value range with a little headroom; flat series get a unit band.
std::pair<double, double> range_of(const std::vector<const std::vector<double>*>& series) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto* s : series) {
    for (double v : *s) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) return {0, 1};
  if (hi - lo < 1e-9) return {lo - 0.5, hi + 0.5};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

class Frame {
 public:
  Frame(std::ostringstream& out, double y0, double width, double height, double x_lo, double x_hi, double v_lo,
        double v_hi)
      : out_(out), y0_(y0), w_(width), h_(height), x_lo_(x_lo), x_hi_(x_hi), v_lo_(v_lo), v_hi_(v_hi) {}

  double x(double v) const { return kLeft + (v - x_lo_) / (x_hi_ - x_lo_) * (w_ - kLeft - kRight); }
  double y(double v) const { return y0_ + kTop + (v_hi_ - v) / (v_hi_ - v_lo_) * (h_ - kTop - kBottom); }
  double top() const { return y0_ + kTop; }
  double bottom() const { return y0_ + h_ - kBottom; }

  void axes(const std::string& title, const std::string& unit, const std::vector<double>& x_ticks,
            const std::string& x_label) {
    out_ << "<g class=\"axes\">\n";
    out_ << "<text x=\"" << num(kLeft) << "\" y=\"" << num(y0_ + 18) << "\" font-size=\"13\" font-weight=\"bold\">"
         << escape(title) << "</text>\n";
    out_ << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(top()) << "\" width=\"" << num(w_ - kLeft - kRight)
         << "\" height=\"" << num(bottom() - top()) << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"0.8\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double v = v_lo_ + (v_hi_ - v_lo_) * i / 4.0;
      out_ << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(w_ - kRight) << "\" y1=\"" << num(y(v)) << "\" y2=\""
           << num(y(v)) << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
      out_ << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y(v) + 4)
           << "\" font-size=\"10\" text-anchor=\"end\">" << detail::fixed(v, 1) << "</text>\n";
    }
    out_ << "<text x=\"14\" y=\"" << num((top() + bottom()) / 2) << "\" font-size=\"10\" transform=\"rotate(-90 14 "
         << num((top() + bottom()) / 2) << ")\" text-anchor=\"middle\">" << escape(unit) << "</text>\n";
    for (double t : x_ticks) {
      out_ << "<text x=\"" << num(x(t)) << "\" y=\"" << num(bottom() + 14) << "\" font-size=\"10\" text-anchor=\"middle\">"
           << detail::format_double(t) << "</text>\n";
    }
    out_ << "<text x=\"" << num((kLeft + w_ - kRight) / 2) << "\" y=\"" << num(bottom() + 28)
         << "\" font-size=\"10\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
    out_ << "</g>\n";
  }

  // Piecewise-constant series: slot t (1-based) spans [t-1, t]. Gaps (NaN)
  // break the line.
  void steps(const std::vector<double>& v, const SeriesStyle& style, const std::string& name) {
    std::string path;
    bool pen = false;
    for (std::size_t t = 0; t < v.size(); ++t) {
      if (!std::isfinite(v[t])) {
        pen = false;
        continue;
      }
      const double yy = y(v[t]);
      path += (pen ? " L" : " M") + num(x(static_cast<double>(t))) + " " + num(yy);
      path += " L" + num(x(static_cast<double>(t + 1))) + " " + num(yy);
      pen = true;
    }
    polyline(path, style, name);
  }

  void points(const std::vector<double>& xs, const std::vector<double>& ys, const SeriesStyle& style,
              const std::string& name) {
    std::string path;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(ys[i])) continue;
      path += (path.empty() ? " M" : " L") + num(x(xs[i])) + " " + num(y(ys[i]));
      out_ << "<circle cx=\"" << num(x(xs[i])) << "\" cy=\"" << num(y(ys[i])) << "\" r=\"2.5\" fill=\"" << style.color
           << "\"/>\n";
    }
    polyline(path, style, name);
  }

  void marker(double at, const std::string& label, int slot) {
    out_ << "<line class=\"marker\" data-slot=\"" << slot << "\" x1=\"" << num(x(at)) << "\" x2=\"" << num(x(at)) << "\" y1=\"" << num(top())
         << "\" y2=\"" << num(bottom()) << "\" stroke=\"#555\" stroke-width=\"0.8\" stroke-dasharray=\"4 3\"/>\n";
    out_ << "<text class=\"marker\" data-slot=\"" << slot << "\" x=\"" << num(x(at)) << "\" y=\"" << num(top() - 3)
         << "\" font-size=\"11\" text-anchor=\"middle\">" << label << "</text>\n";
  }

  void legend(const std::vector<std::pair<std::string, SeriesStyle>>& items) {
    double lx = w_ - kRight - 130.0 * static_cast<double>(items.size());
    for (const auto& [label, style] : items) {
      out_ << "<line x1=\"" << num(lx) << "\" x2=\"" << num(lx + 18) << "\" y1=\"" << num(y0_ + 14) << "\" y2=\""
           << num(y0_ + 14) << "\" stroke=\"" << style.color << "\" stroke-width=\"2\"/>\n";
      out_ << "<text x=\"" << num(lx + 22) << "\" y=\"" << num(y0_ + 18) << "\" font-size=\"10\">" << escape(label)
           << "</text>\n";
      lx += 130;
    }
  }

 private:
  void polyline(const std::string& path, const SeriesStyle& style, const std::string& name) {
    if (path.empty()) return;
    out_ << "<path class=\"" << name << "\" d=\"" << path.substr(1) << "\" fill=\"none\" stroke=\"" << style.color
         << "\" stroke-width=\"" << num(style.width) << "\"";
    if (!style.dash.empty()) out_ << " stroke-dasharray=\"" << style.dash << "\"";
    out_ << "/>\n";
  }

  std::ostringstream& out_;
  double y0_, w_, h_, x_lo_, x_hi_, v_lo_, v_hi_;
};

std::string header(double width, double height) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out.str();
}

std::vector<double> day_ticks(int slots) {
  std::vector<double> ticks;
  for (int t = 0; t <= slots; t += 24) ticks.push_back(t);
  return ticks;
}

}  // namespace

std::string render_week_svg(const DayResult& day, const PlantConfig& config, const ChartSpec& spec) {
  const int n = day.baseline.slots();
  if (n == 0) throw BadParams("nothing to render: empty schedule");
  const double width = spec.width_px;
  const double height = spec.panel_height_px * static_cast<double>(spec.panels.size());
  std::ostringstream out;
  out << header(width, height);
  const auto ticks = day_ticks(n);

  for (std::size_t p = 0; p < spec.panels.size(); ++p) {
    const double y0 = spec.panel_height_px * static_cast<double>(p);
    out << "<g class=\"panel\">\n";
    switch (spec.panels[p]) {
      case Panel::Prices: {
        std::vector<double> sidc(static_cast<std::size_t>(n), NAN);
        for (int t = 0; t < n; ++t) {
          if (day.window.contains(t + 1) && static_cast<std::size_t>(t) < day.prices.sidc_eur_mwh.size()) {
            sidc[static_cast<std::size_t>(t)] = day.prices.sidc_eur_mwh[static_cast<std::size_t>(t)];
          }
        }
        auto [lo, hi] = range_of({&day.prices.day_ahead_eur_mwh, &sidc});
        Frame f(out, y0, width, spec.panel_height_px, 0, n, lo, hi);
        f.axes("Prices", "EUR/MWh", ticks, "time slot");
        f.legend({{"day-ahead", spec.day_ahead}, {"SIDC", spec.sidc}});
        f.steps(day.prices.day_ahead_eur_mwh, spec.day_ahead, "day-ahead");
        f.steps(sidc, spec.sidc, "sidc");
        if (spec.window_markers) {
          f.marker(day.window.tau1 - 1, "O", day.window.tau1);
          f.marker(day.window.tau2, "C", day.window.tau2);
        }
        break;
      }
      case Panel::Schedule: {
        auto [lo, hi] = range_of({&day.baseline.p_b, &day.flexible.p_b});
        lo = std::min(lo, 0.0);
        Frame f(out, y0, width, spec.panel_height_px, 0, n, lo, hi);
        f.axes("Grid purchase", "MW", ticks, "time slot");
        f.legend({{"baseline", spec.baseline}, {"flexible", spec.flexible}});
        std::vector<double> flex_net(day.flexible.p_b);
        for (std::size_t t = 0; t < flex_net.size() && t < day.flexible.p_m.size(); ++t) flex_net[t] += day.flexible.p_m[t];
        f.steps(day.baseline.p_b, spec.baseline, "baseline");
        f.steps(flex_net, spec.flexible, "flexible");
        if (spec.window_markers) {
          f.marker(day.window.tau1 - 1, "O", day.window.tau1);
          f.marker(day.window.tau2, "C", day.window.tau2);
        }
        break;
      }
      case Panel::Storage: {
        std::vector<double> base_total(static_cast<std::size_t>(n), 0), flex_total(static_cast<std::size_t>(n), 0);
        for (const auto& s : day.baseline.inv) {
          for (int t = 0; t < n; ++t) base_total[static_cast<std::size_t>(t)] += s[static_cast<std::size_t>(t)];
        }
        for (const auto& s : day.flexible.inv) {
          for (int t = 0; t < n; ++t) flex_total[static_cast<std::size_t>(t)] += s[static_cast<std::size_t>(t)];
        }
        double floors = 0, caps = 0;
        for (const auto& s : config.silos) {
          floors += s.floor_t;
          caps += s.capacity_t;
        }
        const std::vector<double> bounds{floors, caps};
        auto [lo, hi] = range_of({&base_total, &flex_total, &bounds});
        Frame f(out, y0, width, spec.panel_height_px, 0, n, lo, hi);
        f.axes("Storage", "t", ticks, "time slot");
        f.legend({{"baseline", spec.baseline}, {"flexible", spec.flexible}});
        const SeriesStyle limit{"#999999", 0.8, "2 2"};
        f.steps(std::vector<double>(static_cast<std::size_t>(n), floors), limit, "floor");
        f.steps(std::vector<double>(static_cast<std::size_t>(n), caps), limit, "capacity");
        f.steps(base_total, spec.baseline, "baseline");
        f.steps(flex_total, spec.flexible, "flexible");
        if (spec.window_markers) {
          f.marker(day.window.tau1 - 1, "O", day.window.tau1);
          f.marker(day.window.tau2, "C", day.window.tau2);
        }
        break;
      }
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void render_week(const DayResult& day, const PlantConfig& config, const ChartSpec& spec,
                 const std::filesystem::path& path) {
  detail::write_file(path, render_week_svg(day, config, spec));
}

std::string render_sweep_svg(const SweepResult& result) {
  const double width = 720, panel = 240;
  std::ostringstream out;
  out << header(width, 2 * panel);
  std::vector<double> xs, cost, savings;
  for (const auto& p : result.points) {
    xs.push_back(p.value);
    cost.push_back(p.feasible ? p.normalized_cost : NAN);
    savings.push_back(p.feasible ? p.normalized_savings : NAN);
  }
  double x_lo = 0, x_hi = 1;
  if (!xs.empty()) {
    x_lo = *std::min_element(xs.begin(), xs.end());
    x_hi = *std::max_element(xs.begin(), xs.end());
    if (x_hi - x_lo < 1e-12) {
      x_lo -= 0.5;
      x_hi += 0.5;
    }
  }
  const std::string label = to_string(result.spec.parameter);
  const SeriesStyle cost_style{"#000000", 1.5, ""};
  const SeriesStyle savings_style{"#d62728", 1.5, ""};
  int row = 0;
  for (const auto& [title, series, style] :
       {std::tuple{"Normalized production cost", &cost, cost_style},
        std::tuple{"Normalized savings by flexibility", &savings, savings_style}}) {
    auto [lo, hi] = range_of({series});
    out << "<g class=\"panel\">\n";
    Frame f(out, panel * row, width, panel, x_lo, x_hi, lo, hi);
    f.axes(title, "EUR/MWh", xs, label);
    f.points(xs, *series, style, row == 0 ? "cost" : "savings");
    out << "</g>\n";
    ++row;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace flexsched
