#pragma once

#include <magbill/vec2.hpp>

#include <string>
#include <vector>

namespace magbill::cli {

struct SvgPolyline {
  std::vector<Vec2> points;
  bool closed = false;
  std::string stroke = "#222222";
};

struct SvgMarkerGroup {
  std::vector<Vec2> points;
  std::string fill = "#1f77b4";
};

struct SvgStyle {
  double width_px = 800.0;
  double stroke_width = 0.004;  // fraction of the larger data extent
  double marker_radius = 0.003; // same
};

struct SvgScene {
  std::vector<SvgPolyline> paths;
  std::vector<SvgMarkerGroup> markers;
};

/// Standalone SVG document. The viewBox covers the data bounds plus a 5%
/// margin; y is flipped so the plot reads in the usual orientation. Throws
/// EmptyPlot when the scene has no points.
std::string export_svg(const SvgScene& scene, const SvgStyle& style = {});

/// Categorical colour for group i.
std::string palette_colour(std::size_t i);

}  // namespace magbill::cli
