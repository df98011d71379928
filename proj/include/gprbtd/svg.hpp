#pragma once

#include <span>
#include <string>

#include "gprbtd/evaluate.hpp"

namespace gprbtd {

struct NamedCurve {
  std::string name;
  RocCurve curve;
};

struct PlotOptions {
  double pd_min = 0.0;  // lower end of the y axis, e.g. 0.5 for a truncated plot
  int width = 640;
  int height = 480;
  std::string title = "ROC";
};

// Step-interpolated ROC curves as a standalone SVG document.
std::string roc_svg(std::span<const NamedCurve> curves, const PlotOptions& opt = {});

}  // namespace gprbtd
