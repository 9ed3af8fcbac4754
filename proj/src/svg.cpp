#include "tradebench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace tradebench::svg {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 170, kTop = 50, kBottom = 60;

std::string esc(std::string_view s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

class Axis {
public:
  Axis(double lo, double hi, bool log_scale, double px_lo, double px_hi)
      : log_(log_scale), px_lo_(px_lo), px_hi_(px_hi) {
    if (log_) {
      lo_ = std::floor(std::log10(lo));
      hi_ = std::ceil(std::log10(hi));
      if (hi_ <= lo_) hi_ = lo_ + 1;
    } else {
      const double pad = hi > lo ? 0.05 * (hi - lo) : (lo != 0.0 ? 0.1 * std::abs(lo) : 1.0);
      lo_ = lo - pad;
      hi_ = hi + pad;
    }
  }

  double map(double v) const {
    const double t = ((log_ ? std::log10(v) : v) - lo_) / (hi_ - lo_);
    return px_lo_ + t * (px_hi_ - px_lo_);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log_) {
      for (double e = lo_; e <= hi_ + 1e-9; e += 1.0) out.push_back(std::pow(10.0, e));
      return out;
    }
    const double raw = (hi_ - lo_) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo_ / step) * step; v <= hi_ + 1e-12; v += step) out.push_back(std::abs(v) < 1e-12 ? 0.0 : v);
    return out;
  }

private:
  bool log_;
  double lo_ = 0, hi_ = 1;
  double px_lo_, px_hi_;
};

struct Canvas {
  std::ostringstream out;

  explicit Canvas(std::string_view title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" << esc(title)
        << "</text>\n";
  }

  void axes(const Axis& x, const Axis& y, const AxisOptions& xo, const AxisOptions& yo) {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    out << "<g class=\"axes\" stroke=\"#333\">\n"
        << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\"/>\n"
        << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\"/>\n";
    for (double t : x.ticks()) {
      const double px = x.map(t);
      if (px < x0 - 0.5 || px > x1 + 0.5) continue;
      out << "<line x1=\"" << num(px) << "\" y1=\"" << y0 << "\" x2=\"" << num(px) << "\" y2=\"" << y0 + 5
          << "\"/><text stroke=\"none\" x=\"" << num(px) << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\">"
          << tick_label(t) << "</text>\n";
    }
    for (double t : y.ticks()) {
      const double py = y.map(t);
      if (py > y0 + 0.5 || py < y1 - 0.5) continue;
      out << "<line x1=\"" << x0 - 5 << "\" y1=\"" << num(py) << "\" x2=\"" << x0 << "\" y2=\"" << num(py)
          << "\"/><text stroke=\"none\" x=\"" << x0 - 8 << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
          << tick_label(t) << "</text>\n";
    }
    out << "</g>\n"
        << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">" << esc(xo.label)
        << (xo.log_scale ? " (log)" : "") << "</text>\n"
        << "<text x=\"20\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << (y0 + y1) / 2 << ")\">" << esc(yo.label) << (yo.log_scale ? " (log)" : "") << "</text>\n";
  }

  void legend_entry(std::size_t row, std::string_view name, std::string_view color) {
    const double x = kWidth - kRight + 20, y = kTop + 10 + 20.0 * static_cast<double>(row);
    out << "<g class=\"legend\"><rect x=\"" << x << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"12\" fill=\""
        << color << "\"/><text x=\"" << x + 18 << "\" y=\"" << y + 2 << "\">" << esc(name) << "</text></g>\n";
  }

  std::string finish() {
    out << "</svg>\n";
    return out.str();
  }
};

std::pair<double, double> extent(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 1.0};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi};
}

}  // namespace

std::string_view color_of(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::NB: return "#1f77b4";
    case Algorithm::LR: return "#ff7f0e";
    case Algorithm::SVM: return "#2ca02c";
    case Algorithm::KNN: return "#d62728";
    case Algorithm::DT: return "#9467bd";
    case Algorithm::RF: return "#8c564b";
  }
  return "#7f7f7f";
}

std::string_view color_of(std::string_view tag) noexcept {
  for (Algorithm a : kAllAlgorithms)
    if (to_string(a) == tag) return color_of(a);
  return "#7f7f7f";
}

std::string line_chart(std::string_view title, const AxisOptions& x, const AxisOptions& y,
                       const std::vector<Series>& series) {
  std::vector<double> xs, ys;
  for (const auto& s : series)
    for (const auto& [px, py] : s.points) {
      if ((x.log_scale && px <= 0) || (y.log_scale && py <= 0)) continue;
      xs.push_back(px);
      ys.push_back(py);
    }
  const auto [xlo, xhi] = extent(xs);
  const auto [ylo, yhi] = extent(ys);
  const Axis xa(x.log_scale && xs.empty() ? 1.0 : xlo, x.log_scale && xs.empty() ? 10.0 : xhi, x.log_scale, kLeft,
                kWidth - kRight);
  const Axis ya(y.log_scale && ys.empty() ? 1.0 : ylo, y.log_scale && ys.empty() ? 10.0 : yhi, y.log_scale,
                kHeight - kBottom, kTop);

  Canvas canvas(title);
  canvas.axes(xa, ya, x, y);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    std::ostringstream poly;
    std::ostringstream marks;
    for (const auto& [px, py] : s.points) {
      if ((x.log_scale && px <= 0) || (y.log_scale && py <= 0)) continue;
      poly << num(xa.map(px)) << ',' << num(ya.map(py)) << ' ';
      marks << "<circle cx=\"" << num(xa.map(px)) << "\" cy=\"" << num(ya.map(py)) << "\" r=\"3.5\" fill=\"" << s.color
            << "\"/>";
    }
    canvas.out << "<g class=\"series\" data-name=\"" << esc(s.name) << "\"><polyline fill=\"none\" stroke=\""
               << s.color << "\" stroke-width=\"2\" points=\"" << poly.str() << "\"/>" << marks.str() << "</g>\n";
    canvas.legend_entry(i, s.name, s.color);
  }
  return canvas.finish();
}

std::string frontier_chart(std::string_view title, const Frontier& frontier) {
  std::vector<double> ts, qs;
  for (const auto& p : frontier.points) {
    if (p.time_s > 0) ts.push_back(p.time_s);
    qs.push_back(p.quality);
  }
  const auto [tlo, thi] = extent(ts);
  const auto [qlo, qhi] = extent(qs);
  const AxisOptions xo{"time (s)", true};
  const AxisOptions yo{"quality (macro F1)", false};
  const Axis xa(ts.empty() ? 1.0 : tlo, ts.empty() ? 10.0 : thi, true, kLeft, kWidth - kRight);
  const Axis ya(qlo, qhi, false, kHeight - kBottom, kTop);

  Canvas canvas(title);
  canvas.axes(xa, ya, xo, yo);

  canvas.out << "<polyline class=\"hull\" fill=\"none\" stroke=\"#555\" stroke-dasharray=\"6 3\" points=\"";
  for (std::size_t i : frontier.hull) {
    const auto& p = frontier.points[i];
    if (p.time_s > 0) canvas.out << num(xa.map(p.time_s)) << ',' << num(ya.map(p.quality)) << ' ';
  }
  canvas.out << "\"/>\n";

  for (std::size_t i = 0; i < frontier.points.size(); ++i) {
    const auto& p = frontier.points[i];
    if (!(p.time_s > 0)) continue;
    const bool pareto = frontier.on_pareto(i);
    const auto color = color_of(p.algorithm);
    const double cx = xa.map(p.time_s), cy = ya.map(p.quality);
    canvas.out << "<circle class=\"" << (pareto ? "pareto" : "dominated") << "\" cx=\"" << num(cx) << "\" cy=\""
               << num(cy) << "\" r=\"6\" stroke=\"" << color << "\" stroke-width=\"2\" fill=\""
               << (pareto ? std::string(color) : std::string("white")) << "\"/>"
               << "<text x=\"" << num(cx + 9) << "\" y=\"" << num(cy - 7) << "\">" << esc(p.algorithm) << "</text>\n";
  }
  canvas.legend_entry(0, "Pareto (filled)", "#333");
  return canvas.finish();
}

}  // namespace tradebench::svg
