#include "dcoord/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dcoord {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 620.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 790.0;
constexpr double kTop = 60.0;
constexpr double kBottom = 560.0;
constexpr std::size_t kMaxPointsPerSeries = 2400;
constexpr std::size_t kMaxLegendEntries = 24;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Extent {
  double lo = 0.0;
  double hi = 1.0;
};

Extent padded(double lo, double hi) {
  if (!(lo <= hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  double span = hi - lo;
  if (span <= 0.0) span = std::max(std::abs(lo), 1.0);
  return {lo - 0.04 * span, hi + 0.04 * span};
}

}  // namespace

void write_line_chart(const std::filesystem::path& path,
                      const std::string& title, const std::string& x_label,
                      const std::string& y_label,
                      const std::vector<Series>& series) {
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  bool any = false;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!any) {
        x_lo = x_hi = x;
        y_lo = y_hi = y;
        any = true;
      }
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  const Extent ex = padded(x_lo, x_hi);
  const Extent ey = padded(y_lo, y_hi);

  const auto map_x = [&](double x) {
    return kLeft + (x - ex.lo) / (ex.hi - ex.lo) * (kRight - kLeft);
  };
  const auto map_y = [&](double y) {
    return kBottom - (y - ey.lo) / (ey.hi - ey.lo) * (kBottom - kTop);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write plot " + path.string());

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"30\" font-size=\"16\""
      << " font-family=\"sans-serif\" text-anchor=\"middle\">" << title
      << "</text>\n";

  // Grid and tick labels.
  for (int t = 0; t <= 4; ++t) {
    const double fx = ex.lo + t * (ex.hi - ex.lo) / 4.0;
    const double fy = ey.lo + t * (ey.hi - ey.lo) / 4.0;
    const double px = map_x(fx);
    const double py = map_y(fy);
    out << "<line x1=\"" << px << "\" y1=\"" << kTop << "\" x2=\"" << px
        << "\" y2=\"" << kBottom << "\" stroke=\"#dddddd\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << py << "\" x2=\"" << kRight
        << "\" y2=\"" << py << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << kBottom + 20
        << "\" font-size=\"11\" font-family=\"sans-serif\""
        << " text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4
        << "\" font-size=\"11\" font-family=\"sans-serif\""
        << " text-anchor=\"end\">" << fmt(fy) << "</text>\n";
  }
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
      << kRight - kLeft << "\" height=\"" << kBottom - kTop
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kBottom + 40
      << "\" font-size=\"13\" font-family=\"sans-serif\""
      << " text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"20\" y=\"" << (kTop + kBottom) / 2
      << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\""
      << " transform=\"rotate(-90 20 " << (kTop + kBottom) / 2 << ")\">"
      << y_label << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& pts = series[s].points;
    if (pts.empty()) continue;
    const std::size_t stride =
        std::max<std::size_t>(1, pts.size() / kMaxPointsPerSeries);
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[s % 10]
        << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); i += stride)
      out << fmt(map_x(pts[i].first)) << ',' << fmt(map_y(pts[i].second)) << ' ';
    out << fmt(map_x(pts.back().first)) << ',' << fmt(map_y(pts.back().second));
    out << "\"/>\n";
  }

  for (std::size_t s = 0; s < std::min(series.size(), kMaxLegendEntries); ++s) {
    const double ly = kTop + 16.0 * s;
    out << "<line x1=\"" << kRight + 12 << "\" y1=\"" << ly << "\" x2=\""
        << kRight + 36 << "\" y2=\"" << ly << "\" stroke=\"" << kPalette[s % 10]
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kRight + 42 << "\" y=\"" << ly + 4
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << series[s].label
        << "</text>\n";
  }
  out << "</svg>\n";
}

void write_run_plots(const std::filesystem::path& dir,
                     const TrajectoryLog& log) {
  if (log.rounds.empty())
    throw std::invalid_argument("cannot plot an empty trajectory");
  std::filesystem::create_directories(dir);
  const std::size_t n = log.rounds.front().y.size();
  const std::size_t q = log.rounds.front().y.front().size();

  if (q >= 2) {
    std::vector<Series> xy(n);
    for (std::size_t i = 0; i < n; ++i) {
      xy[i].label = "agent " + std::to_string(i);
      for (const auto& rec : log.rounds)
        xy[i].points.emplace_back(rec.y[i][0], rec.y[i][1]);
    }
    write_line_chart(dir / "trajectory_xy.svg", "output-plane trajectories",
                     "y component 0", "y component 1", xy);
  }

  const auto per_component =
      [&](const char* field,
          const std::vector<std::vector<double>> RoundRecord::*member) {
        std::vector<Series> all;
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t dim = (log.rounds.front().*member)[i].size();
          for (std::size_t c = 0; c < dim; ++c) {
            Series s;
            s.label = std::string(field) + "[" + std::to_string(i) + "]." +
                      std::to_string(c);
            for (const auto& rec : log.rounds)
              s.points.emplace_back(static_cast<double>(rec.round),
                                    (rec.*member)[i][c]);
            all.push_back(std::move(s));
          }
        }
        return all;
      };

  write_line_chart(dir / "outputs.svg", "outputs per axis", "round", "y",
                   per_component("y", &RoundRecord::y));
  write_line_chart(dir / "states.svg", "plant states", "round", "x",
                   per_component("x", &RoundRecord::x));
  write_line_chart(dir / "lambda.svg", "multipliers", "round", "lambda",
                   per_component("lambda", &RoundRecord::lambda));
}

}  // namespace dcoord
