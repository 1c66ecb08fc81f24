#include <magbill/errors.hpp>
#include <magbill_cli/svg.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <sstream>

namespace magbill::cli {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

}  // namespace

std::string palette_colour(std::size_t i) {
  static constexpr std::array<const char*, 10> colours{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                       "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colours[i % colours.size()];
}

std::string export_svg(const SvgScene& scene, const SvgStyle& style) {
  double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
  double xmax = -xmin, ymax = -xmin;
  std::size_t count = 0;
  auto take = [&](Vec2 p) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, -p.y);
    ymax = std::max(ymax, -p.y);
    ++count;
  };
  for (const auto& path : scene.paths)
    for (Vec2 p : path.points) take(p);
  for (const auto& group : scene.markers)
    for (Vec2 p : group.points) take(p);
  if (count == 0) throw Error(ErrorCode::EmptyPlot, "nothing to draw");

  double w = xmax - xmin, h = ymax - ymin;
  const double extent = std::max({w, h, 1e-9});
  if (w < 1e-12 * extent) w = extent;
  if (h < 1e-12 * extent) h = extent;
  const double x0 = 0.5 * (xmin + xmax) - 0.55 * w, y0 = 0.5 * (ymin + ymax) - 0.55 * h;
  const double vw = 1.1 * w, vh = 1.1 * h;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fixed6(style.width_px)
     << "\" height=\"" << fixed6(style.width_px * vh / vw) << "\" viewBox=\"" << fixed6(x0) << ' ' << fixed6(y0)
     << ' ' << fixed6(vw) << ' ' << fixed6(vh) << "\">\n";

  const std::string stroke_width = fixed6(style.stroke_width * extent);
  for (const auto& path : scene.paths) {
    if (path.points.empty()) continue;
    os << "  <path fill=\"none\" stroke=\"" << path.stroke << "\" stroke-width=\"" << stroke_width << "\" d=\"";
    for (std::size_t i = 0; i < path.points.size(); ++i) {
      os << (i == 0 ? "M" : " L") << fixed6(path.points[i].x) << ' ' << fixed6(-path.points[i].y);
    }
    if (path.closed) os << " Z";
    os << "\"/>\n";
  }

  const std::string radius = fixed6(style.marker_radius * extent);
  for (std::size_t g = 0; g < scene.markers.size(); ++g) {
    const auto& group = scene.markers[g];
    os << "  <g class=\"orbit\" id=\"orbit-" << g << "\" fill=\"" << group.fill << "\">\n";
    for (Vec2 p : group.points) {
      os << "    <circle cx=\"" << fixed6(p.x) << "\" cy=\"" << fixed6(-p.y) << "\" r=\"" << radius << "\"/>\n";
    }
    os << "  </g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace magbill::cli
