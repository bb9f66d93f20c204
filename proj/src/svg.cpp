#include "gaincap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gaincap::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 76.0;
constexpr double kRight = 24.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

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

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range span_of(const std::vector<Series>& series, bool use_y) {
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (const auto& s : series) {
    const auto& v = use_y ? s.y : s.x;
    for (double t : v) {
      if (!std::isfinite(t)) continue;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  }
  if (lo > hi) return {0.0, 1.0};
  if (lo == hi) {
    const double pad = std::max(1.0, std::abs(lo)) * 0.05;
    return {lo - pad, hi + pad};
  }
  const double pad = (hi - lo) * 0.04;
  return {lo - pad, hi + pad};
}

// Tick step of the form {1,2,5}*10^k giving 4..8 ticks across the range.
std::vector<double> ticks_for(const Range& r) {
  const double raw = (r.hi - r.lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag * 1.0001) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> out;
  double t = std::ceil(r.lo / step) * step;
  for (; t <= r.hi + step * 1e-9; t += step) {
    // snap values like 0.30000000000000004 back onto the step lattice
    const double snapped = std::round(t / step) * step;
    out.push_back(snapped == 0.0 ? 0.0 : snapped);
  }
  return out;
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label,
                      const std::vector<Series>& series) {
  if (series.empty()) throw std::invalid_argument("line_plot: no series");
  for (const auto& s : series)
    if (s.x.size() != s.y.size() || s.x.empty())
      throw std::invalid_argument("line_plot: series \"" + s.label +
                                  "\" is empty or ragged");

  const Range rx = span_of(series, false);
  const Range ry = span_of(series, true);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) {
    return kLeft + (x - rx.lo) / (rx.hi - rx.lo) * plot_w;
  };
  auto py = [&](double y) {
    return kTop + plot_h - (y - ry.lo) / (ry.hi - ry.lo) * plot_h;
  };

  std::string out;
  out +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      "width=\"720\" height=\"480\" viewBox=\"0 0 720 480\">\n";
  out += "<rect width=\"720\" height=\"480\" fill=\"#ffffff\"/>\n";

  // gridlines and ticks
  const auto xticks = ticks_for(rx);
  const auto yticks = ticks_for(ry);
  out += "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : xticks)
    out += "<line x1=\"" + num(px(t)) + "\" y1=\"" + num(kTop) + "\" x2=\"" +
           num(px(t)) + "\" y2=\"" + num(kTop + plot_h) + "\"/>\n";
  for (double t : yticks)
    out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(t)) + "\" x2=\"" +
           num(kLeft + plot_w) + "\" y2=\"" + num(py(t)) + "\"/>\n";
  out += "</g>\n";

  out += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">\n";
  for (double t : xticks)
    out += "<text x=\"" + num(px(t)) + "\" y=\"" + num(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + num(t) + "</text>\n";
  for (double t : yticks)
    out += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(t) + 4) +
           "\" text-anchor=\"end\">" + num(t) + "</text>\n";
  out += "</g>\n";

  // frame
  out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"#444444\"/>\n";

  // series
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % kPaletteSize];
    const auto& s = series[i];
    if (s.x.size() == 1) {
      out += "<circle cx=\"" + num(px(s.x[0])) + "\" cy=\"" +
             num(py(s.y[0])) + "\" r=\"4\" fill=\"" + color + "\"/>\n";
      continue;
    }
    out += "<polyline fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (k) out += ' ';
      out += num(px(s.x[k])) + "," + num(py(s.y[k]));
    }
    out += "\"/>\n";
  }

  // labels
  out += "<g font-family=\"sans-serif\" font-size=\"14\" fill=\"#000000\">\n";
  out += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"22\" "
         "text-anchor=\"middle\" font-size=\"16\">" +
         escape(title) + "</text>\n";
  out += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" +
         num(kHeight - 14) + "\" text-anchor=\"middle\">" + escape(x_label) +
         "</text>\n";
  out += "<text x=\"20\" y=\"" + num(kTop + plot_h / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         num(kTop + plot_h / 2) + ")\">" + escape(y_label) + "</text>\n";
  out += "</g>\n";

  // legend (skipped for a single unlabeled series)
  const bool want_legend =
      series.size() > 1 || !series[0].label.empty();
  if (want_legend) {
    const double lx = kLeft + plot_w - 160;
    double ly = kTop + 12;
    out += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
      const char* color = kPalette[i % kPaletteSize];
      out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
             num(lx + 24) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"";
      out += color;
      out += "\" stroke-width=\"2\"/>\n";
      out += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly) + "\">" +
             escape(series[i].label) + "</text>\n";
      ly += 18;
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gaincap::svg
