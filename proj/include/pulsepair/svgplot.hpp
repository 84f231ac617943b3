#ifndef PULSEPAIR_SVGPLOT_HPP
#define PULSEPAIR_SVGPLOT_HPP

#include <span>
#include <string>

#include "pulsepair/skystats.hpp"

namespace pulsepair {

struct PlotOptions {
  std::string title = "Cohen's d vs RA";
  int width = 800;
  int height = 480;
};

/// Cohen's d against RA bin centre with the FWHM interval shaded and a caption
/// carrying the peak-bin binomial probability. Output depends only on the
/// inputs. `daily` points, when given, are drawn as small grey markers.
std::string plot_stats(std::span<const RABinStats> stats, double fwhm_center_hr,
                       double fwhm_width_hr, const PlotOptions& options = {},
                       std::span<const DailyBinStats> daily = {});

}  // namespace pulsepair

#endif  // PULSEPAIR_SVGPLOT_HPP
