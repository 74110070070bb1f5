#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace optlat {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_y = false;
  int width = 640;
  int height = 420;
};

// Standalone SVG text; identical input gives identical bytes. Throws
// std::invalid_argument for mismatched series lengths, non-finite values, or a
// nonpositive y under log_y.
std::string render_svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& options);

// Renders first, so nothing is written when the input is rejected.
void emit_svg_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path,
                   const PlotOptions& options = {});

}  // namespace optlat
