#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oio/control/flight_controller.hpp"
#include "oio/mission/suite.hpp"
#include "oio/plume/course.hpp"

namespace oio::mission {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal standalone SVG line chart. Output depends only on the data, so
// identical inputs give identical files.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  void add(Series s) { series_.push_back(std::move(s)); }
  void add_box(const plume::Box& b) { boxes_.push_back(b); }
  void add_marker(double x, double y, std::string label) {
    markers_.push_back({x, y, std::move(label)});
  }
  // Fixes the axis ranges instead of fitting them to the data.
  void set_range(double x0, double x1, double y0, double y1) { range_ = Range{x0, x1, y0, y1}; }

  std::string render() const {
    const Range r = range_ ? *range_ : fit();
    auto sx = [&](double x) { return kLeft + (x - r.x0) / (r.x1 - r.x0) * kPlotW; };
    auto sy = [&](double y) { return kTop + (1.0 - (y - r.y0) / (r.y1 - r.y0)) * kPlotH; };
    std::ostringstream o;
    o << std::setprecision(6);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title_) << "</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW << "\" height=\""
      << kPlotH << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
      const double fx = r.x0 + (r.x1 - r.x0) * i / 5.0;
      const double fy = r.y0 + (r.y1 - r.y0) * i / 5.0;
      o << "<text x=\"" << sx(fx) << "\" y=\"" << kTop + kPlotH + 16
        << "\" text-anchor=\"middle\">" << tick(fx) << "</text>\n"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(fy) + 4 << "\" text-anchor=\"end\">"
        << tick(fy) << "</text>\n";
    }
    o << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kHeight - 8
      << "\" text-anchor=\"middle\">" << escape(x_label_) << "</text>\n"
      << "<text transform=\"translate(16," << kTop + kPlotH / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label_) << "</text>\n";
    for (const auto& b : boxes_) {
      o << "<rect x=\"" << sx(b.x_min) << "\" y=\"" << sy(b.y_max) << "\" width=\""
        << sx(b.x_max) - sx(b.x_min) << "\" height=\"" << sy(b.y_min) - sy(b.y_max)
        << "\" fill=\"#bbbbbb\"/>\n";
    }
    for (std::size_t i = 0; i < series_.size(); ++i) {
      const auto& s = series_[i];
      const char* colour = kPalette[i % kPalette.size()];
      o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        o << sx(s.x[k]) << ',' << sy(s.y[k]) << ' ';
      }
      o << "\"/>\n";
      o << "<text x=\"" << kLeft + kPlotW + 8 << "\" y=\"" << kTop + 14 + 16 * i << "\" fill=\""
        << colour << "\">" << escape(s.label) << "</text>\n";
    }
    for (const auto& m : markers_) {
      o << "<circle cx=\"" << sx(m.x) << "\" cy=\"" << sy(m.y)
        << "\" r=\"5\" fill=\"red\"/>\n<text x=\"" << sx(m.x) + 8 << "\" y=\"" << sy(m.y) - 6
        << "\">" << escape(m.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
  }

 private:
  struct Range {
    double x0, x1, y0, y1;
  };
  struct Marker {
    double x, y;
    std::string label;
  };

  static constexpr int kWidth = 760, kHeight = 440;
  static constexpr int kLeft = 70, kTop = 34, kPlotW = 540, kPlotH = 360;
  static constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                          "#9467bd", "#ff7f0e", "#17becf"};

  Range fit() const {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series_) {
      for (double x : s.x)
        if (std::isfinite(x)) x0 = std::min(x0, x), x1 = std::max(x1, x);
      for (double y : s.y)
        if (std::isfinite(y)) y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
    if (!std::isfinite(x0)) return {0.0, 1.0, 0.0, 1.0};
    if (x1 - x0 < 1e-12) x1 = x0 + 1.0;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    return {x0, x1, y0 - pad, y1 + pad};
  }

  static std::string tick(double v) {
    std::ostringstream o;
    o << std::setprecision(3) << v;
    return o.str();
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
      }
    }
    return out;
  }

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::vector<plume::Box> boxes_;
  std::vector<Marker> markers_;
  std::optional<Range> range_;
};

struct PlotOptions {
  std::optional<plume::Course> course;   // walls and obstacles under the trajectories
  control::GainTable gains{};            // for the step responses
  std::vector<double> episode_returns;   // RL learning curve; else cumulative trial reward
  double step_duration = 20.0;           // s
};

inline const std::vector<std::string>& plot_manifest() {
  static const std::vector<std::string> files = {
      "trajectory.csv",     "trajectory.svg",     "filters.csv",      "filters.svg",
      "learning_curve.csv", "learning_curve.svg", "step_response.csv", "step_response.svg"};
  return files;
}

// Writes the files of plot_manifest() into out_dir and returns their paths.
inline std::vector<std::filesystem::path> emit_plots(const std::vector<TrialRecord>& records,
                                                     const std::filesystem::path& out_dir,
                                                     const PlotOptions& opt = {}) {
  if (records.empty()) throw std::invalid_argument("emit_plots: no trial records");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& body) {
    const auto path = out_dir / name;
    write_file(path, [&](std::ostream& o) { o << body; });
    written.push_back(path);
  };
  auto label = [](const TrialRecord& r) { return "seed " + std::to_string(r.seed); };

  {  // trajectories
    std::ostringstream csv;
    csv << "seed,step,x,y,heading\n";
    SvgPlot plot("Trajectories", "x (m)", "y (m)");
    for (const auto& r : records) {
      Series s{label(r), {}, {}};
      for (const auto& w : r.rows) {
        csv << r.seed << ',' << w.step << ',' << fmt(w.pose.position.x) << ','
            << fmt(w.pose.position.y) << ',' << fmt(w.pose.heading_deg) << '\n';
        s.x.push_back(w.pose.position.x);
        s.y.push_back(w.pose.position.y);
      }
      plot.add(std::move(s));
    }
    if (opt.course) {
      const auto& c = *opt.course;
      for (const auto& b : c.walls) plot.add_box(b);
      for (const auto& b : c.obstacles) plot.add_box(b);
      plot.set_range(0.0, c.bounds.x, 0.0, c.bounds.y);
      const Vec2 src = c.source_xy();
      plot.add_marker(src.x, src.y, "source");
    }
    put("trajectory.csv", csv.str());
    put("trajectory.svg", plot.render());
  }

  {  // divergence and signal line
    std::ostringstream csv;
    csv << "seed,step,t,c,e_fast,e_slow,d,s,tau,phi\n";
    SvgPlot plot("Divergence D and signal S", "t (s)", "response");
    for (const auto& r : records) {
      Series d{"D " + label(r), {}, {}}, s{"S " + label(r), {}, {}};
      for (const auto& w : r.rows) {
        csv << r.seed << ',' << w.step << ',' << fmt(w.t) << ',' << fmt(w.c) << ','
            << fmt(w.e_fast) << ',' << fmt(w.e_slow) << ',' << fmt(w.d) << ',' << fmt(w.s) << ','
            << fmt(w.tau) << ',' << fmt(w.phi) << '\n';
        d.x.push_back(w.t);
        d.y.push_back(w.d);
        s.x.push_back(w.t);
        s.y.push_back(w.s);
      }
      plot.add(std::move(d));
      plot.add(std::move(s));
    }
    put("filters.csv", csv.str());
    put("filters.svg", plot.render());
  }

  {  // learning curve
    std::ostringstream csv;
    SvgPlot plot("Learning curve", "episode", "return");
    if (!opt.episode_returns.empty()) {
      csv << "episode,return\n";
      Series s{"return", {}, {}};
      for (std::size_t e = 0; e < opt.episode_returns.size(); ++e) {
        csv << e << ',' << fmt(opt.episode_returns[e]) << '\n';
        s.x.push_back(static_cast<double>(e));
        s.y.push_back(opt.episode_returns[e]);
      }
      plot.add(std::move(s));
    } else {
      plot = SvgPlot("Cumulative reward", "step", "reward");
      csv << "seed,step,cumulative_reward\n";
      for (const auto& r : records) {
        Series s{label(r), {}, {}};
        double total = 0.0;
        for (const auto& w : r.rows) {
          total += w.reward;
          csv << r.seed << ',' << w.step << ',' << fmt(total) << '\n';
          s.x.push_back(static_cast<double>(w.step));
          s.y.push_back(total);
        }
        plot.add(std::move(s));
      }
    }
    put("learning_curve.csv", csv.str());
    put("learning_curve.svg", plot.render());
  }

  {  // controller step responses, unit step per axis
    std::ostringstream csv;
    csv << "axis,t,command,response,actuator\n";
    SvgPlot plot("Step responses", "t (s)", "normalised response");
    const struct {
      const char* name;
      control::PirGains gains;
      control::AxisPlant plant;
    } axes[] = {{"altitude", opt.gains.altitude, control::altitude_plant()},
                {"pitch", opt.gains.pitch, control::pitch_plant()},
                {"roll", opt.gains.roll, control::roll_plant()},
                {"yaw", opt.gains.yaw, control::yaw_plant()}};
    for (const auto& a : axes) {
      const auto tr = control::axis_step_response(a.gains, a.plant, 1.0, opt.step_duration);
      for (std::size_t k = 0; k < tr.t.size(); ++k) {
        csv << a.name << ',' << fmt(tr.t[k]) << ',' << fmt(tr.command[k]) << ','
            << fmt(tr.response[k]) << ',' << fmt(tr.actuator[k]) << '\n';
      }
      plot.add({a.name, tr.t, tr.response});
    }
    put("step_response.csv", csv.str());
    put("step_response.svg", plot.render());
  }
  return written;
}

}  // namespace oio::mission
