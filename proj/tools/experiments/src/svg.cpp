#include "plap/experiments/svg.hpp"

#include "plap/experiments/artifacts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace plap::experiments::svg {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) lo -= 0.5, hi += 0.5;
  }
};

class Frame {
 public:
  Frame(Range x, Range y) : x_(x), y_(y) {}
  double px(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const {
    return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom);
  }
  const Range& x() const { return x_; }
  const Range& y() const { return y_; }

 private:
  Range x_, y_;
};

void open(std::ostringstream& os, const Axes& a) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<desc>" << escape(a.description) << "</desc>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(a.title) << "</text>\n";
}

void axes(std::ostringstream& os, const Axes& a, const Frame& f) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  os << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x().lo + (f.x().hi - f.x().lo) * k / 4.0;
    const double yv = f.y().lo + (f.y().hi - f.y().lo) * k / 4.0;
    os << "<text x=\"" << f.px(xv) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">" << num(xv)
       << "</text>\n";
    os << "<text x=\"" << x0 - 6 << "\" y=\"" << f.py(yv) + 4 << "\" text-anchor=\"end\">" << num(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
     << escape(a.x_label) << "</text>\n";
  os << "<text transform=\"translate(16," << (y0 + y1) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(a.y_label) << "</text>\n";
}

// Piecewise-linear approximation of viridis.
std::string colormap(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops = {{{68, 1, 84},
                                                                  {59, 82, 139},
                                                                  {33, 145, 140},
                                                                  {94, 201, 98},
                                                                  {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double w = t - static_cast<double>(i);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<int>(std::lround(stops[i][c] * (1 - w) + stops[i + 1][c] * w));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace

std::string plot(const Axes& a, const std::vector<Series>& series, bool diagonal) {
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  if (diagonal) {
    xr.add(yr.lo), xr.add(yr.hi), yr.add(xr.lo), yr.add(xr.hi);
  }
  xr.finish();
  yr.finish();
  const Frame f(xr, yr);
  std::ostringstream os;
  open(os, a);
  axes(os, a, f);
  if (diagonal) {
    const double lo = std::max(xr.lo, yr.lo), hi = std::min(xr.hi, yr.hi);
    os << "<line x1=\"" << f.px(lo) << "\" y1=\"" << f.py(lo) << "\" x2=\"" << f.px(hi) << "\" y2=\""
       << f.py(hi) << "\" stroke=\"grey\" stroke-dasharray=\"4 3\"/>\n";
  }
  int legend_row = 0;
  for (const auto& s : series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.connect) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
      for (std::size_t i = 0; i < n; ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) os << f.px(s.x[i]) << ',' << f.py(s.y[i]) << ' ';
      os << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << "<circle cx=\"" << f.px(s.x[i]) << "\" cy=\"" << f.py(s.y[i]) << "\" r=\"" << s.radius
           << "\" fill=\"" << s.color << "\" fill-opacity=\"0.6\"/>\n";
      }
    }
    if (!s.label.empty()) {
      const double ly = kTop + 14 + 16 * legend_row++;
      os << "<rect x=\"" << kWidth - kRight - 150 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
         << s.color << "\"/>\n";
      os << "<text x=\"" << kWidth - kRight - 135 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string heatmap(const Axes& a, const Eigen::MatrixXd& values, double x_lo, double x_hi, double y_lo,
                    double y_hi, const std::vector<std::pair<double, double>>& markers) {
  Range vr;
  for (Eigen::Index k = 0; k < values.size(); ++k) vr.add(values.data()[k]);
  vr.finish();
  Range xr{x_lo, x_hi}, yr{y_lo, y_hi};
  xr.finish();
  yr.finish();
  const Frame f(xr, yr);
  const double cw = (f.px(xr.hi) - f.px(xr.lo)) / std::max<Eigen::Index>(values.cols(), 1);
  const double ch = (f.py(yr.lo) - f.py(yr.hi)) / std::max<Eigen::Index>(values.rows(), 1);
  std::ostringstream os;
  open(os, a);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      const std::string fill = std::isfinite(v) ? colormap((v - vr.lo) / (vr.hi - vr.lo)) : "#bbbbbb";
      os << "<rect x=\"" << kLeft + j * cw << "\" y=\"" << kHeight - kBottom - (i + 1) * ch << "\" width=\""
         << cw + 0.5 << "\" height=\"" << ch + 0.5 << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  axes(os, a, f);
  for (const auto& [mx, my] : markers) {
    os << "<circle cx=\"" << f.px(mx) << "\" cy=\"" << f.py(my)
       << "\" r=\"6\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n";
  }
  os << "<text x=\"" << kLeft << "\" y=\"" << kTop - 6 << "\" font-size=\"11\">range [" << num(vr.lo) << ", "
     << num(vr.hi) << "], dark = low</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string histogram(const Axes& a, const std::vector<double>& values, int bins) {
  Range xr;
  for (double v : values) xr.add(v);
  xr.finish();
  bins = std::max(bins, 1);
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    auto b = static_cast<int>((v - xr.lo) / (xr.hi - xr.lo) * bins);
    ++counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))];
  }
  Range yr{0.0, static_cast<double>(*std::max_element(counts.begin(), counts.end()))};
  yr.finish();
  const Frame f(xr, yr);
  std::ostringstream os;
  open(os, a);
  axes(os, a, f);
  const double w = (xr.hi - xr.lo) / bins;
  for (int b = 0; b < bins; ++b) {
    const double x0 = f.px(xr.lo + b * w), x1 = f.px(xr.lo + (b + 1) * w);
    const double top = f.py(counts[static_cast<std::size_t>(b)]);
    os << "<rect x=\"" << x0 << "\" y=\"" << top << "\" width=\"" << x1 - x0 << "\" height=\"" << f.py(0) - top
       << "\" fill=\"#4c72b0\" stroke=\"white\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace plap::experiments::svg
