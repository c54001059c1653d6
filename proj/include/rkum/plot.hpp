#pragma once

// Minimal SVG line plots of influence profiles: one row per method, with an
// "Ideal Data" and a "Contaminated Data" panel side by side.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rkum::plot {

struct ProfileRow {
  std::string label;
  Eigen::VectorXd ideal;
  Eigen::VectorXd contaminated;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
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

inline std::string panel(const Eigen::VectorXd& v, const std::string& title, double x0, double y0,
                         double w, double h) {
  const double left = 50, right = 10, top = 24, bottom = 34;
  const double pw = w - left - right, ph = h - top - bottom;
  double lo = v.size() ? v.minCoeff() : 0.0, hi = v.size() ? v.maxCoeff() : 1.0;
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  std::string s = "<g transform=\"translate(" + num(x0) + "," + num(y0) + ")\">\n";
  s += "<text x=\"" + num(left + pw / 2) + "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">" +
       escape(title) + "</text>\n";
  s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" +
       num(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  s += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(h - 6) +
       "\" text-anchor=\"middle\" font-size=\"11\">Index</text>\n";
  s += "<text x=\"12\" y=\"" + num(top + ph / 2) + "\" transform=\"rotate(-90 12 " +
       num(top + ph / 2) + ")\" text-anchor=\"middle\" font-size=\"11\">Influence value</text>\n";
  s += "<text x=\"" + num(left - 4) + "\" y=\"" + num(top + 10) +
       "\" text-anchor=\"end\" font-size=\"9\">" + num(hi) + "</text>\n";
  s += "<text x=\"" + num(left - 4) + "\" y=\"" + num(top + ph) +
       "\" text-anchor=\"end\" font-size=\"9\">" + num(lo) + "</text>\n";
  s += "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1\" points=\"";
  const double denom = v.size() > 1 ? static_cast<double>(v.size() - 1) : 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double px = left + pw * static_cast<double>(i) / denom;
    const double py = top + ph * (hi - v(i)) / (hi - lo);
    if (i) s += ' ';
    s += num(px) + "," + num(py);
  }
  s += "\"/>\n</g>\n";
  return s;
}

}  // namespace detail

inline std::string profiles_svg(const std::vector<ProfileRow>& rows) {
  const double pw = 420, ph = 220, label_h = 20;
  const double width = 2 * pw;
  const double height = static_cast<double>(rows.size()) * (ph + label_h);
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(width) +
                  "\" height=\"" + detail::num(height) + "\" font-family=\"sans-serif\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  double y = 0;
  for (const auto& r : rows) {
    s += "<text x=\"" + detail::num(width / 2) + "\" y=\"" + detail::num(y + 15) +
         "\" text-anchor=\"middle\" font-size=\"14\" font-weight=\"bold\">" +
         detail::escape(r.label) + "</text>\n";
    s += detail::panel(r.ideal, "Ideal Data", 0, y + label_h, pw, ph);
    s += detail::panel(r.contaminated, "Contaminated Data", pw, y + label_h, pw, ph);
    y += ph + label_h;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace rkum::plot
