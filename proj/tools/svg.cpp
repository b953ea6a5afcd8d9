#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace radiomap::tools {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string render_line_plot(const std::vector<Series>& series, const std::string& title,
                             int width, int height) {
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const Series& s : series) {
    for (double v : s.x) {
      x_min = std::min(x_min, v);
      x_max = std::max(x_max, v);
    }
    for (double v : s.y) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (!(x_max > x_min)) x_max = x_min + 1.0;
  if (!(y_max > y_min)) y_max = y_min + 1.0;

  const double margin = 46.0;
  const double plot_w = width - 2.0 * margin;
  const double plot_h = height - 2.0 * margin;
  auto sx = [&](double x) { return margin + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return height - margin - (y - y_min) / (y_max - y_min) * plot_h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
     << "font-family=\"sans-serif\">" << title << "</text>\n";
  // Axes.
  os << "<line x1=\"" << num(margin) << "\" y1=\"" << num(height - margin) << "\" x2=\""
     << num(width - margin) << "\" y2=\"" << num(height - margin)
     << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"" << num(margin) << "\" y1=\"" << num(margin) << "\" x2=\"" << num(margin)
     << "\" y2=\"" << num(height - margin) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  // Axis extent labels.
  os << "<text x=\"" << num(margin) << "\" y=\"" << height - margin + 18
     << "\" font-size=\"11\" font-family=\"sans-serif\">" << num(x_min) << "</text>\n";
  os << "<text x=\"" << num(width - margin) << "\" y=\"" << height - margin + 18
     << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << num(x_max)
     << "</text>\n";
  os << "<text x=\"" << num(margin - 6) << "\" y=\"" << num(height - margin)
     << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << num(y_min)
     << "</text>\n";
  os << "<text x=\"" << num(margin - 6) << "\" y=\"" << num(margin + 4)
     << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << num(y_max)
     << "</text>\n";

  double legend_y = margin + 8.0;
  for (const Series& s : series) {
    if (s.markers_only) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        os << "<circle cx=\"" << num(sx(s.x[i])) << "\" cy=\"" << num(sy(s.y[i]))
           << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i) os << ' ';
        os << num(sx(s.x[i])) << ',' << num(sy(s.y[i]));
      }
      os << "\"/>\n";
    }
    os << "<text x=\"" << num(width - margin - 4) << "\" y=\"" << num(legend_y)
       << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" << s.color
       << "\">" << s.label << "</text>\n";
    legend_y += 16.0;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace radiomap::tools
