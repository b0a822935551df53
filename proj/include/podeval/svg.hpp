#pragma once

// Direct SVG emission for POD curve plots: mean curve, lower confidence
// bound, hit/miss scatter, and the a90 / a90_95 markers. No external
// renderer; coordinates are formatted at fixed precision so identical
// inputs produce identical bytes.

#include <cstdarg>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "podeval/pod.hpp"

namespace podeval::io {

struct scatter_point {
  double a = 0.0;
  double rate = 0.0;  // observed hits / trials
};

namespace detail {

inline void appendf(std::string& s, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  s += buf;
}

}  // namespace detail

inline std::string render_pod_svg(const std::vector<curve_point>& curve,
                                  const std::vector<scatter_point>& scatter,
                                  std::optional<double> a90, std::optional<double> a90_95,
                                  const std::string& x_label = "a",
                                  const std::string& title = "") {
  const double width = 720.0, height = 480.0;
  const double ml = 62.0, mr = 20.0, mt = 36.0, mb = 52.0;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double a_lo = 0.0, a_hi = 1.0;
  if (!curve.empty()) {
    a_lo = curve.front().a;
    a_hi = curve.back().a;
  }
  if (!(a_hi > a_lo)) a_hi = a_lo + 1.0;

  auto px = [&](double a) { return ml + (a - a_lo) / (a_hi - a_lo) * pw; };
  auto py = [&](double p) { return mt + (1.0 - p) * ph; };

  std::string s;
  detail::appendf(s,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                  "viewBox=\"0 0 %.0f %.0f\">\n",
                  width, height, width, height);
  detail::appendf(s, "<rect width=\"%.0f\" height=\"%.0f\" fill=\"white\"/>\n", width, height);
  if (!title.empty())
    detail::appendf(s,
                    "<text x=\"%.2f\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" "
                    "text-anchor=\"middle\">%s</text>\n",
                    ml + pw / 2.0, title.c_str());

  // frame and gridlines
  detail::appendf(s,
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" "
                  "stroke=\"black\"/>\n",
                  ml, mt, pw, ph);
  for (int i = 0; i <= 10; i += 2) {
    const double p = i / 10.0;
    detail::appendf(s,
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#dddddd\"/>\n",
                    ml, py(p), ml + pw, py(p));
    detail::appendf(s,
                    "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\" "
                    "text-anchor=\"end\">%.1f</text>\n",
                    ml - 6.0, py(p) + 4.0, p);
  }
  for (int i = 0; i <= 5; ++i) {
    const double a = a_lo + (a_hi - a_lo) * i / 5.0;
    detail::appendf(s,
                    "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\" "
                    "text-anchor=\"middle\">%.3g</text>\n",
                    px(a), mt + ph + 16.0, a);
  }
  detail::appendf(s,
                  "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"12\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  ml + pw / 2.0, height - 12.0, x_label.c_str());
  detail::appendf(s,
                  "<text x=\"16\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"12\" "
                  "text-anchor=\"middle\" transform=\"rotate(-90 16 %.2f)\">POD</text>\n",
                  mt + ph / 2.0, mt + ph / 2.0);

  // 90% POD guide
  detail::appendf(s,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#888888\" "
                  "stroke-dasharray=\"6 3\"/>\n",
                  ml, py(0.9), ml + pw, py(0.9));

  auto polyline = [&](const char* color, const char* dash, auto value) {
    detail::appendf(s, "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.8\"%s points=\"",
                    color, dash);
    for (const auto& cp : curve) detail::appendf(s, "%.2f,%.2f ", px(cp.a), py(value(cp)));
    s += "\"/>\n";
  };
  polyline("#2166ac", "", [](const curve_point& cp) { return cp.pod_mean; });
  polyline("#1a9850", " stroke-dasharray=\"7 4\"",
           [](const curve_point& cp) { return cp.pod_lower95; });

  for (const auto& pt : scatter) {
    if (pt.a < a_lo || pt.a > a_hi) continue;
    detail::appendf(s,
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.6\" fill=\"none\" "
                    "stroke=\"#333333\"/>\n",
                    px(pt.a), py(pt.rate));
  }

  auto marker = [&](double a, const char* label) {
    detail::appendf(s,
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#c51b1b\" "
                    "stroke-dasharray=\"3 3\"/>\n",
                    px(a), mt, px(a), mt + ph);
    detail::appendf(s,
                    "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\" "
                    "fill=\"#c51b1b\" text-anchor=\"middle\">%s</text>\n",
                    px(a), mt - 4.0, label);
  };
  if (a90 && *a90 >= a_lo && *a90 <= a_hi) marker(*a90, "a90");
  if (a90_95 && *a90_95 >= a_lo && *a90_95 <= a_hi) marker(*a90_95, "a90/95");

  s += "</svg>\n";
  return s;
}

}  // namespace podeval::io
