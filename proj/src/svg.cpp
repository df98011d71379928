#include "gprbtd/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace gprbtd {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string roc_svg(std::span<const NamedCurve> curves, const PlotOptions& opt) {
  if (!(opt.pd_min >= 0.0 && opt.pd_min < 1.0)) throw std::domain_error("plot: pd_min must be in [0, 1)");
  const double left = 60, right = 150, top = 40, bottom = 50;
  const double pw = opt.width - left - right, ph = opt.height - top - bottom;
  double far_max = 0.0;
  for (const auto& c : curves) far_max = std::max(far_max, c.curve.max_far());
  if (far_max <= 0) far_max = 1.0;
  auto px = [&](double far) { return left + pw * far / far_max; };
  auto py = [&](double pd) { return top + ph * (1.0 - (std::max(pd, opt.pd_min) - opt.pd_min) / (1.0 - opt.pd_min)); };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) +
                  "\" height=\"" + std::to_string(opt.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + escape(opt.title) + "</text>\n";
  s += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double pd = opt.pd_min + (1.0 - opt.pd_min) * i / 5.0, far = far_max * i / 5.0;
    s += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(py(pd) + 4) + "\" text-anchor=\"end\">" + fmt(pd) + "</text>\n";
    s += "<text x=\"" + fmt(px(far)) + "\" y=\"" + fmt(top + ph + 16) + "\" text-anchor=\"middle\">" + fmt(far) + "</text>\n";
  }
  s += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"" + fmt(opt.height - 12.0) + "\" text-anchor=\"middle\">FAR (1/m\xC2\xB2)</text>\n";
  s += "<text x=\"16\" y=\"" + fmt(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       fmt(top + ph / 2) + ")\">Pd</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    std::string d = "M" + fmt(px(0)) + "," + fmt(py(0));
    double pd = 0.0;
    for (const auto& p : curves[i].curve.points) {
      d += " L" + fmt(px(p.far_per_m2)) + "," + fmt(py(pd));
      pd = p.pd;
      d += " L" + fmt(px(p.far_per_m2)) + "," + fmt(py(pd));
    }
    d += " L" + fmt(px(far_max)) + "," + fmt(py(pd));
    s += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    const double ly = top + 16.0 * (i + 1);
    s += "<line x1=\"" + fmt(left + pw + 10) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(left + pw + 30) + "\" y2=\"" +
         fmt(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fmt(left + pw + 36) + "\" y=\"" + fmt(ly + 4) + "\">" + escape(curves[i].name) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace gprbtd
