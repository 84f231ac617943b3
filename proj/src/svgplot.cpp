#include "pulsepair/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pulsepair/format.hpp"

namespace pulsepair {

namespace {

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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

std::string px(double v) { return fixed(v, 2); }

}  // namespace

std::string plot_stats(std::span<const RABinStats> stats, double fwhm_center_hr,
                       double fwhm_width_hr, const PlotOptions& options,
                       std::span<const DailyBinStats> daily) {
  const double w = options.width;
  const double h = options.height;
  const double left = 70, right = 20, top = 40, bottom = 90;
  const double plot_w = w - left - right;
  const double plot_h = h - top - bottom;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << options.width << "\" height=\"" << options.height
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << px(w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(options.title) << "</text>\n";

  if (stats.empty()) {
    svg << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(plot_w)
        << "\" height=\"" << px(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(left + plot_w / 2) << "\" y=\"" << px(top + plot_h / 2)
        << "\" text-anchor=\"middle\" fill=\"#b00000\">warning: no statistics to plot</text>\n";
    svg << "</svg>\n";
    return svg.str();
  }

  double x_lo = stats.front().ra_low_hr, x_hi = stats.front().ra_high_hr;
  double d_lo = -4.0, d_hi = 4.0;
  auto finite_d = [](double d) { return std::isfinite(d); };
  for (const auto& s : stats) {
    x_lo = std::min(x_lo, s.ra_low_hr);
    x_hi = std::max(x_hi, s.ra_high_hr);
    if (finite_d(s.cohens_d)) {
      d_lo = std::min(d_lo, s.cohens_d);
      d_hi = std::max(d_hi, s.cohens_d);
    }
  }
  for (const auto& p : daily) {
    if (finite_d(p.stats.cohens_d)) {
      d_lo = std::min(d_lo, p.stats.cohens_d);
      d_hi = std::max(d_hi, p.stats.cohens_d);
    }
  }
  d_lo = std::floor(d_lo);
  d_hi = std::ceil(d_hi);
  auto sx = [&](double ra) { return left + (ra - x_lo) / (x_hi - x_lo) * plot_w; };
  auto sy = [&](double d) {
    const double c = std::clamp(d, d_lo, d_hi);
    return top + (d_hi - c) / (d_hi - d_lo) * plot_h;
  };

  // FWHM shading, clipped to the axis range.
  const double f_lo = std::max(x_lo, fwhm_center_hr - 0.5 * fwhm_width_hr);
  const double f_hi = std::min(x_hi, fwhm_center_hr + 0.5 * fwhm_width_hr);
  if (f_hi > f_lo) {
    svg << "<rect x=\"" << px(sx(f_lo)) << "\" y=\"" << px(top) << "\" width=\""
        << px(sx(f_hi) - sx(f_lo)) << "\" height=\"" << px(plot_h)
        << "\" fill=\"#cfe3ff\" stroke=\"none\"/>\n";
    svg << "<text x=\"" << px((sx(f_lo) + sx(f_hi)) / 2) << "\" y=\"" << px(top + 14)
        << "\" text-anchor=\"middle\" fill=\"#3060a0\">FWHM</text>\n";
  }

  svg << "<g stroke=\"#dddddd\">\n";
  for (double d = d_lo; d <= d_hi + 1e-9; d += 1.0)
    svg << "<line x1=\"" << px(left) << "\" y1=\"" << px(sy(d)) << "\" x2=\"" << px(left + plot_w)
        << "\" y2=\"" << px(sy(d)) << "\"/>\n";
  svg << "</g>\n";
  svg << "<line x1=\"" << px(left) << "\" y1=\"" << px(sy(0)) << "\" x2=\"" << px(left + plot_w)
      << "\" y2=\"" << px(sy(0)) << "\" stroke=\"#888888\"/>\n";
  svg << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(plot_w)
      << "\" height=\"" << px(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks: every half hour of RA, every unit of d.
  svg << "<g text-anchor=\"middle\">\n";
  for (double t = std::ceil(x_lo * 2.0 - 1e-9) / 2.0; t <= x_hi + 1e-9; t += 0.5)
    svg << "<line x1=\"" << px(sx(t)) << "\" y1=\"" << px(top + plot_h) << "\" x2=\"" << px(sx(t))
        << "\" y2=\"" << px(top + plot_h + 5) << "\" stroke=\"black\"/><text x=\"" << px(sx(t))
        << "\" y=\"" << px(top + plot_h + 18) << "\">" << fixed(t, 1) << "</text>\n";
  svg << "</g>\n<g text-anchor=\"end\">\n";
  for (double d = d_lo; d <= d_hi + 1e-9; d += 1.0)
    svg << "<text x=\"" << px(left - 6) << "\" y=\"" << px(sy(d) + 4) << "\">" << fixed(d, 0)
        << "</text>\n";
  svg << "</g>\n";
  svg << "<text x=\"" << px(left + plot_w / 2) << "\" y=\"" << px(top + plot_h + 36)
      << "\" text-anchor=\"middle\">RA (hrs)</text>\n";
  svg << "<text x=\"18\" y=\"" << px(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << px(top + plot_h / 2) << ")\">Cohen's d</text>\n";

  if (!daily.empty()) {
    svg << "<g fill=\"#999999\">\n";
    for (const auto& p : daily) {
      const double c = 0.5 * (p.stats.ra_low_hr + p.stats.ra_high_hr);
      svg << "<circle cx=\"" << px(sx(c)) << "\" cy=\"" << px(sy(p.stats.cohens_d))
          << "\" r=\"1.5\"/>\n";
    }
    svg << "</g>\n";
  }

  svg << "<g fill=\"#1f3f8f\">\n";
  for (const auto& s : stats) {
    const double c = 0.5 * (s.ra_low_hr + s.ra_high_hr);
    svg << "<circle cx=\"" << px(sx(c)) << "\" cy=\"" << px(sy(s.cohens_d)) << "\" r=\"3\"/>\n";
  }
  svg << "</g>\n";

  const PeakReport peak = find_peak(stats, std::nullopt);
  if (peak.valid) {
    const double c = 0.5 * (peak.stats.ra_low_hr + peak.stats.ra_high_hr);
    svg << "<circle cx=\"" << px(sx(c)) << "\" cy=\"" << px(sy(peak.stats.cohens_d))
        << "\" r=\"6\" fill=\"none\" stroke=\"#c00000\"/>\n";
    svg << "<text x=\"" << px(left) << "\" y=\"" << px(h - 20) << "\">" << escape(peak.caption)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace pulsepair
