#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "uavcgan/core/csv.hpp"

namespace uavcgan::cli {

/// Line chart of column `y` against column `x`, one polyline per distinct value of `group`.
/// Reads nothing but the CSV text, so the plot is a pure view of the table.
inline std::string svg_line_plot(const std::string& csv_text, const std::string& x, const std::string& y,
                                 const std::string& group, const std::string& title) {
  const auto table = csv::parse_table(csv_text);
  auto column = [&](const std::string& name) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    require(it != table.header.end(), ErrorKind::InvalidArgument, "plot column '" + name + "' not in table");
    return static_cast<std::size_t>(it - table.header.begin());
  };
  const auto xi = column(x), yi = column(y), gi = column(group);
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<std::string> order;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& r : table.rows) {
    if (r[xi].empty() || r[yi].empty()) continue;
    const double xv = csv::parse_double(r[xi]), yv = csv::parse_double(r[yi]);
    if (!series.count(r[gi])) order.push_back(r[gi]);
    series[r[gi]].push_back({xv, yv});
    x0 = std::min(x0, xv);
    x1 = std::max(x1, xv);
    y0 = std::min(y0, yv);
    y1 = std::max(y1, yv);
  }
  if (order.empty()) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;

  constexpr double W = 640, H = 400, L = 70, R = 150, T = 40, B = 50;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
  auto f = [](double v) { return csv::format_double(std::round(v * 100.0) / 100.0); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n"
    << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    o << "<text x=\"" << f(px(xv)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << csv::format_double(std::round(xv * 1000) / 1000)
      << "</text>\n<text x=\"" << L - 6 << "\" y=\"" << f(py(yv) + 4) << "\" text-anchor=\"end\">"
      << csv::format_double(std::round(yv * 1000) / 1000) << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << x << "</text>\n"
    << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (T + H - B) / 2
    << ")\">" << y << "</text>\n";
  for (std::size_t s = 0; s < order.size(); ++s) {
    const char* color = colors[s % 7];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [xv, yv] : series[order[s]]) o << f(px(xv)) << ',' << f(py(yv)) << ' ';
    o << "\"/>\n<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (s + 1) << "\" fill=\"" << color << "\">" << group
      << '=' << order[s] << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace uavcgan::cli
