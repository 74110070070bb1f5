#include "optlat/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "optlat/io.hpp"

namespace optlat {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

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

// Fixed-precision coordinates keep the output stable and compact.
std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    } else if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

std::string render_svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  Range xr;
  Range yr;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("series '" + s.label + "' has mismatched x and y lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
        throw std::invalid_argument("series '" + s.label + "' contains a non-finite value");
      if (opt.log_y && !(s.y[i] > 0.0))
        throw std::invalid_argument("series '" + s.label + "' has a nonpositive value on a log axis");
      xr.add(s.x[i]);
      yr.add(opt.log_y ? std::log10(s.y[i]) : s.y[i]);
    }
  }
  xr.finish();
  yr.finish();

  const double left = 70.0;
  const double right = 150.0;
  const double top = 40.0;
  const double bottom = 50.0;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  const auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto py = [&](double y) { return top + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    os << "<text x=\"" << coord(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(opt.title) << "</text>\n";

  os << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
     << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top + ph) << "\" x2=\"" << coord(left + pw)
     << "\" y2=\"" << coord(top + ph) << "\"/>\n"
     << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top) << "\" x2=\"" << coord(left)
     << "\" y2=\"" << coord(top + ph) << "\"/>\n"
     << "</g>\n";

  os << "<g class=\"ticks\" font-size=\"10\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    os << "<text x=\"" << coord(px(fx)) << "\" y=\"" << coord(top + ph + 16)
       << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
    os << "<text x=\"" << coord(left - 6) << "\" y=\"" << coord(py(fy) + 4)
       << "\" text-anchor=\"end\">" << tick_label(opt.log_y ? std::pow(10.0, fy) : fy)
       << "</text>\n";
  }
  os << "</g>\n";
  os << "<text x=\"" << coord(left + pw / 2) << "\" y=\"" << coord(opt.height - 12.0)
     << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(opt.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << coord(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"12\""
     << " transform=\"rotate(-90 16 " << coord(top + ph / 2) << ")\">"
     << escape(opt.y_label + (opt.log_y ? " (log)" : "")) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) os << ' ';
      os << coord(px(s.x[i])) << ',' << coord(py(opt.log_y ? std::log10(s.y[i]) : s.y[i]));
    }
    os << "\"/>\n";
    const double ly = top + 14.0 + 18.0 * k;
    os << "<line x1=\"" << coord(left + pw + 12) << "\" y1=\"" << coord(ly) << "\" x2=\""
       << coord(left + pw + 32) << "\" y2=\"" << coord(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n"
       << "<text class=\"legend\" x=\"" << coord(left + pw + 38) << "\" y=\"" << coord(ly + 4)
       << "\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_svg_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path,
                   const PlotOptions& options) {
  const std::string svg = render_svg_plot(series, options);
  write_file_atomic(path, svg);
}

}  // namespace optlat
