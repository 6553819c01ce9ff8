#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace admmgmres::cli {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 190.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr double kMarker = 3.5;

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string tick_label(double v, bool log) {
  if (log) {
    const int e = static_cast<int>(std::lround(std::log10(v)));
    if (e == 0) return "1";
    if (e == 1) return "10";
    return "1e" + std::to_string(e);
  }
  std::ostringstream os;
  os << std::setprecision(4) << (std::abs(v) < 1e-12 ? 0.0 : v);
  return os.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v, bool log) {
    if (!std::isfinite(v) || (log && !(v > 0.0))) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return !(lo <= hi); }
};

/// Maps data to pixels and produces tick positions.
struct Scale {
  bool log = true;
  double lo = 1.0;
  double hi = 10.0;
  double p0 = 0.0;
  double p1 = 1.0;

  double t(double v) const { return log ? std::log10(v) : v; }
  double operator()(double v) const {
    if (log && !(v > 0.0)) v = lo;
    const double f = (t(v) - t(lo)) / (t(hi) - t(lo));
    return p0 + f * (p1 - p0);
  }
  bool placeable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int e0 = static_cast<int>(std::floor(std::log10(lo) + 1e-9));
      const int e1 = static_cast<int>(std::ceil(std::log10(hi) - 1e-9));
      const int stride = std::max(1, (e1 - e0 + 7) / 8);
      for (int e = e0; e <= e1; e += stride) out.push_back(std::pow(10.0, e));
      return out;
    }
    const double step = nice_step((hi - lo) / 6.0);
    for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + 1e-9 * step; v += step)
      out.push_back(v);
    return out;
  }

  static double nice_step(double raw) {
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
  }
};

Scale make_scale(Range r, bool log, double p0, double p1) {
  Scale s;
  s.log = log;
  s.p0 = p0;
  s.p1 = p1;
  if (r.empty()) {
    r.lo = log ? 1.0 : 0.0;
    r.hi = log ? 10.0 : 1.0;
  }
  if (log) {
    s.lo = std::pow(10.0, std::floor(std::log10(r.lo)));
    s.hi = std::pow(10.0, std::ceil(std::log10(r.hi)));
    if (s.hi <= s.lo) s.hi = s.lo * 10.0;
  } else {
    double span = r.hi - r.lo;
    if (!(span > 0.0)) span = std::max(std::abs(r.lo), 1.0);
    const double step = Scale::nice_step(span / 6.0);
    s.lo = std::floor(r.lo / step) * step;
    s.hi = std::ceil(r.hi / step) * step;
    if (s.hi <= s.lo) s.hi = s.lo + step;
  }
  return s;
}

void marker(std::ostream& os, MarkerShape shape, double x, double y, const std::string& color,
            const char* cls) {
  const std::string cx = num(x), cy = num(y), r = num(kMarker);
  switch (shape) {
    case MarkerShape::circle:
      os << "<circle class=\"" << cls << "\" cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r
         << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
      return;
    case MarkerShape::square:
      os << "<rect class=\"" << cls << "\" x=\"" << num(x - kMarker) << "\" y=\""
         << num(y - kMarker) << "\" width=\"" << num(2 * kMarker) << "\" height=\""
         << num(2 * kMarker) << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
      return;
    default:
      break;
  }
  std::ostringstream d;
  const double k = kMarker;
  switch (shape) {
    case MarkerShape::cross:
      d << "M" << num(x - k) << ' ' << num(y - k) << "L" << num(x + k) << ' ' << num(y + k) << "M"
        << num(x - k) << ' ' << num(y + k) << "L" << num(x + k) << ' ' << num(y - k);
      break;
    case MarkerShape::plus:
      d << "M" << num(x - k) << ' ' << cy << "L" << num(x + k) << ' ' << cy << "M" << cx << ' '
        << num(y - k) << "L" << cx << ' ' << num(y + k);
      break;
    case MarkerShape::triangle:
      d << "M" << cx << ' ' << num(y - k) << "L" << num(x + k) << ' ' << num(y + k) << "L"
        << num(x - k) << ' ' << num(y + k) << "Z";
      break;
    default:
      d << "M" << cx << ' ' << num(y - k) << "L" << num(x + k) << ' ' << cy << "L" << cx << ' '
        << num(y + k) << "L" << num(x - k) << ' ' << cy << "Z";
      break;
  }
  os << "<path class=\"" << cls << "\" d=\"" << d.str() << "\" fill=\"none\" stroke=\"" << color
     << "\"/>\n";
}

}  // namespace

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

const std::string& palette(std::size_t i) {
  static const std::vector<std::string> colors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  return colors[i % colors.size()];
}

Plot::Plot(std::string title, AxisSpec x, AxisSpec y)
    : title_(std::move(title)), x_(std::move(x)), y_(std::move(y)) {}

void Plot::add_circle(double radius, std::string label) {
  circles_.push_back({radius, std::move(label)});
}

LineSeries sample_curve(std::string name, const std::function<double(double)>& f, double lo,
                        double hi, std::size_t points, bool log) {
  LineSeries l;
  l.name = std::move(name);
  points = std::max<std::size_t>(points, 2);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    const double x = log ? std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo)))
                         : lo + t * (hi - lo);
    l.x.push_back(x);
    l.y.push_back(f(x));
  }
  return l;
}

void Plot::write(std::ostream& os) const {
  Range rx, ry;
  for (const auto& s : scatter_) {
    for (double v : s.x) rx.add(v, x_.log);
    for (double v : s.y) ry.add(v, y_.log);
  }
  // Reference lines only widen the y range where the data already lies in x.
  for (const auto& l : lines_) {
    for (std::size_t i = 0; i < l.x.size() && i < l.y.size(); ++i) {
      if (!scatter_.empty() && !rx.empty() && (l.x[i] < rx.lo || l.x[i] > rx.hi)) continue;
      rx.add(l.x[i], x_.log);
      ry.add(l.y[i], y_.log);
    }
  }
  for (const auto& c : circles_) {
    rx.add(-c.radius, false);
    rx.add(c.radius, false);
    ry.add(-c.radius, false);
    ry.add(c.radius, false);
  }
  const Scale sx = make_scale(rx, x_.log, kLeft, kWidth - kRight);
  const Scale sy = make_scale(ry, y_.log, kHeight - kBottom, kTop);

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
     << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight)
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"22\" text-anchor=\"middle\" "
     << "font-size=\"15\">" << xml_escape(title_) << "</text>\n";

  // Grid, ticks and axis labels.
  os << "<g class=\"axes\" stroke=\"#dddddd\">\n";
  for (double t : sx.ticks()) {
    const double px = sx(t);
    os << "<line x1=\"" << num(px) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px)
       << "\" y2=\"" << num(kHeight - kBottom) << "\"/>\n"
       << "<text x=\"" << num(px) << "\" y=\"" << num(kHeight - kBottom + 16)
       << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"black\">" << tick_label(t, x_.log)
       << "</text>\n";
  }
  for (double t : sy.ticks()) {
    const double py = sy(t);
    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py) << "\" x2=\"" << num(kWidth - kRight)
       << "\" y2=\"" << num(py) << "\"/>\n"
       << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py + 4)
       << "\" text-anchor=\"end\" stroke=\"none\" fill=\"black\">" << tick_label(t, y_.log)
       << "</text>\n";
  }
  os << "</g>\n"
     << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
     << num(kWidth - kLeft - kRight) << "\" height=\"" << num(kHeight - kTop - kBottom)
     << "\" fill=\"none\" stroke=\"black\"/>\n"
     << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 18)
     << "\" text-anchor=\"middle\">" << xml_escape(x_.label) << "</text>\n"
     << "<text transform=\"translate(20 " << num((kTop + kHeight - kBottom) / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << xml_escape(y_.label) << "</text>\n";

  os << "<defs><clipPath id=\"plot-area\"><rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop)
     << "\" width=\"" << num(kWidth - kLeft - kRight) << "\" height=\""
     << num(kHeight - kTop - kBottom) << "\"/></clipPath></defs>\n";
  os << "<g clip-path=\"url(#plot-area)\">\n";
  for (const auto& c : circles_) {
    os << "<ellipse class=\"circle\" cx=\"" << num(sx(0.0)) << "\" cy=\"" << num(sy(0.0))
       << "\" rx=\"" << num(std::abs(sx(c.radius) - sx(0.0))) << "\" ry=\""
       << num(std::abs(sy(c.radius) - sy(0.0))) << "\" fill=\"none\" stroke=\"#888888\" "
       << "stroke-dasharray=\"4 3\"/>\n";
  }
  for (const auto& l : lines_) {
    os << "<polyline class=\"line\" fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1.5\"";
    if (l.dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < l.x.size() && i < l.y.size(); ++i) {
      if (!sx.placeable(l.x[i]) || !sy.placeable(l.y[i])) continue;
      os << (first ? "" : " ") << num(sx(l.x[i])) << ',' << num(sy(l.y[i]));
      first = false;
    }
    os << "\"/>\n";
  }
  for (const auto& s : scatter_) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      marker(os, s.shape, sx(s.x[i]), sy(s.y[i]), s.color, "marker");
  }
  os << "</g>\n";

  // Legend.
  double ly = kTop + 10;
  const double lx = kWidth - kRight + 16;
  os << "<g class=\"legend\">\n";
  for (const auto& s : scatter_) {
    marker(os, s.shape, lx, ly - 4, s.color, "legend-marker");
    os << "<text x=\"" << num(lx + 12) << "\" y=\"" << num(ly) << "\">" << xml_escape(s.name)
       << "</text>\n";
    ly += 18;
  }
  for (const auto& l : lines_) {
    os << "<line x1=\"" << num(lx - 6) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 6)
       << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << l.color << "\"";
    if (l.dashed) os << " stroke-dasharray=\"3 2\"";
    os << "/>\n<text x=\"" << num(lx + 12) << "\" y=\"" << num(ly) << "\">" << xml_escape(l.name)
       << "</text>\n";
    ly += 18;
  }
  for (const auto& c : circles_) {
    os << "<text x=\"" << num(lx + 12) << "\" y=\"" << num(ly) << "\">" << xml_escape(c.label)
       << "</text>\n";
    ly += 18;
  }
  os << "</g>\n</svg>\n";
}

std::string Plot::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace admmgmres::cli
