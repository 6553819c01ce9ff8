#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace admmgmres::cli {

enum class MarkerShape { circle, cross, square, triangle, diamond, plus };

/// Scatter data; every point becomes one element with class="marker".
struct ScatterSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  MarkerShape shape = MarkerShape::circle;
};

/// Polyline; points that cannot be placed on a log axis are dropped.
struct LineSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#444444";
  bool dashed = false;
};

struct AxisSpec {
  std::string label;
  bool log = true;
};

/// Standalone SVG chart with log or linear axes and a legend.
class Plot {
 public:
  Plot(std::string title, AxisSpec x, AxisSpec y);

  void add(ScatterSeries s) { scatter_.push_back(std::move(s)); }
  void add(LineSeries l) { lines_.push_back(std::move(l)); }
  /// Draws a circle of the given radius centred at the origin (linear axes only).
  void add_circle(double radius, std::string label);

  void write(std::ostream& os) const;
  std::string str() const;

 private:
  struct Circle {
    double radius;
    std::string label;
  };
  std::string title_;
  AxisSpec x_;
  AxisSpec y_;
  std::vector<ScatterSeries> scatter_;
  std::vector<LineSeries> lines_;
  std::vector<Circle> circles_;
};

/// f sampled at `points` positions spaced evenly (in log10 when `log`) over [lo, hi].
LineSeries sample_curve(std::string name, const std::function<double(double)>& f, double lo,
                        double hi, std::size_t points, bool log);

/// Escapes &, <, >, " and ' for XML text and attribute values.
std::string xml_escape(std::string_view s);

/// Palette entry i (cycled).
const std::string& palette(std::size_t i);

}  // namespace admmgmres::cli
