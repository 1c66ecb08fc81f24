#include <magbill/errors.hpp>
#include <magbill/larmor.hpp>

#include "numeric.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace magbill {

namespace {

constexpr double kGrazingSine = 1e-8;

struct Refined {
  double u;
  double value;
};

}  // namespace

CrossingScan scan_circle_crossings(const PlaneCurve& curve, Vec2 center, double r) {
  const auto& grid = curve.crossing_grid();
  const int n = int(grid.size());
  const double h = kTwoPi / n;
  const double r2 = r * r;
  const double tol = 1e-12 * r * std::max(curve.diameter(), r);

  auto g = [&](double u) { return norm2(curve.position(u) - center) - r2; };
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = norm2(grid[i] - center) - r2;

  std::vector<double> roots;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    if ((vals[i] < 0.0) != (vals[j] < 0.0)) {
      const double lo = h * i;
      roots.push_back(detail::bracketed_root(g, lo, lo + h, vals[i], vals[j]));
    }
  }

  CrossingScan scan;
  for (int i = 0; i < n; ++i) {
    const double prev = vals[(i + n - 1) % n], cur = vals[i], next = vals[(i + 1) % n];
    const double lo = h * (i - 1), hi = h * (i + 1);
    if (cur >= 0.0 && cur <= prev && cur <= next) {
      const auto [um, gm] = detail::minimize(g, lo, hi);
      if (gm < -tol) {
        roots.push_back(detail::bracketed_root(g, lo, um, prev, gm));
        roots.push_back(detail::bracketed_root(g, um, hi, gm, next));
      } else if (gm <= tol) {
        scan.tangent = true;
        scan.tangent_u.push_back(wrap_two_pi(um));
      }
    } else if (cur < 0.0 && cur >= prev && cur >= next) {
      const auto [um, neg] = detail::minimize([&](double u) { return -g(u); }, lo, hi);
      const double gm = -neg;
      if (gm > tol) {
        roots.push_back(detail::bracketed_root(g, lo, um, prev, gm));
        roots.push_back(detail::bracketed_root(g, um, hi, gm, next));
      } else if (gm >= -tol) {
        scan.tangent = true;
        scan.tangent_u.push_back(wrap_two_pi(um));
      }
    }
  }

  // A grid point sitting on the circle to rounding splits a touching contact
  // into two roots; if the excursion between them is below tol it is a tangency.
  for (double& u : roots) u = wrap_two_pi(u);
  std::sort(roots.begin(), roots.end());
  if (roots.size() >= 2) {
    std::vector<bool> merged(roots.size(), false);
    for (std::size_t k = 0; k < roots.size(); ++k) {
      const std::size_t next = (k + 1) % roots.size();
      if (merged[k] || merged[next]) continue;
      const double a = roots[k], b = next > k ? roots[next] : roots[next] + kTwoPi;
      if (b - a >= h || b <= a) continue;
      const double mid = 0.5 * (a + b);
      const double sign = g(mid) < 0.0 ? 1.0 : -1.0;
      const double extreme = sign * detail::minimize([&](double u) { return sign * g(u); }, a, b).second;
      if (std::abs(extreme) <= tol) {
        merged[k] = merged[next] = true;
        scan.tangent = true;
        scan.tangent_u.push_back(wrap_two_pi(mid));
      }
    }
    std::vector<double> kept;
    for (std::size_t k = 0; k < roots.size(); ++k)
      if (!merged[k]) kept.push_back(roots[k]);
    roots.swap(kept);
  }

  for (double u : roots) {
    CircleCrossing c;
    c.u = wrap_two_pi(u);
    const FrameSample f = eval_frame(curve, c.u);
    c.point = f.point;
    const Vec2 radial = c.point - center;
    c.circle_angle = std::atan2(radial.y, radial.x);
    const Vec2 w = J(normalized(radial));
    c.crossing_sine = dot(w, f.normal);
    c.outward = c.crossing_sine < 0.0;
    scan.crossings.push_back(c);
  }
  std::sort(scan.crossings.begin(), scan.crossings.end(),
            [](const CircleCrossing& a, const CircleCrossing& b) { return a.u < b.u; });
  return scan;
}

Vec2 larmor_center(Vec2 x, Vec2 v, double r) { return x + r * J(v); }

Vec2 reflect(Vec2 v, Vec2 n) { return v - 2.0 * dot(n, v) * n; }

Vec2 boundary_velocity(const PlaneCurve& curve, const BoundaryState& state) {
  return rotate(eval_frame(curve, state.u).tangent, state.theta);
}

namespace {

// Exit angle eps in (0, pi) with w = R_{-eps} t.
double exit_angle_of(Vec2 w, const FrameSample& f) {
  return -std::atan2(dot(w, f.normal), dot(w, f.tangent));
}

}  // namespace

ArcStep flow_step(const PlaneCurve& curve, const FieldParams& field, const BoundaryState& state) {
  if (!(state.theta > 0.0 && state.theta < kPi)) {
    throw Error(ErrorCode::GrazingIntersection, "entry angle must lie in (0, pi), got " + std::to_string(state.theta));
  }
  const FrameSample entry = eval_frame(curve, state.u);
  const Vec2 v = rotate(entry.tangent, state.theta);
  const Vec2 c = larmor_center(entry.point, v, field.r);
  const Vec2 entry_radial = entry.point - c;
  const double psi0 = std::atan2(entry_radial.y, entry_radial.x);

  const CrossingScan scan = scan_circle_crossings(curve, c, field.r);
  const CircleCrossing* exit = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : scan.crossings) {
    if (!x.outward) continue;
    const double swept = wrap_two_pi(x.circle_angle - psi0);
    if (swept < best) {
      best = swept;
      exit = &x;
    }
  }
  if (exit == nullptr) {
    throw Error(ErrorCode::NoExitFound, "no outward crossing for u=" + std::to_string(state.u) +
                                            " theta=" + std::to_string(state.theta));
  }
  if (std::abs(exit->crossing_sine) < kGrazingSine) {
    throw Error(ErrorCode::GrazingIntersection, "exit crossing sine " + std::to_string(exit->crossing_sine));
  }

  const FrameSample f = eval_frame(curve, exit->u);
  const Vec2 w = J(normalized(exit->point - c));
  const double eps = exit_angle_of(w, f);

  ArcStep step;
  step.entry = state;
  step.center = c;
  step.entry_point = entry.point;
  step.exit_point = exit->point;
  step.exit_velocity = w;
  step.exit_angle = eps;
  step.exit = BoundaryState{exit->u, eps};
  step.swept_angle = best;
  step.arc_length = field.r * best;
  return step;
}

BoundaryState billiard_map_B(const PlaneCurve& curve, const FieldParams& field, const BoundaryState& state) {
  return flow_step(curve, field, state).exit;
}

CenterMapResult center_map_detail(const PlaneCurve& curve, const FieldParams& field, CenterPoint y) {
  CrossingScan scan = scan_circle_crossings(curve, y, field.r);
  const CircleCrossing* exit = nullptr;
  int outward = 0;
  for (const auto& x : scan.crossings) {
    if (x.outward) {
      exit = &x;
      ++outward;
    }
  }
  CenterMapResult res;
  // A touching contact resolved as two coincident crossings is still a tangency.
  const bool touching = outward == 1 && std::abs(exit->crossing_sine) < kGrazingSine;
  if (outward == 0 || touching) {
    if (touching) {
      scan.tangent = true;
      scan.tangent_u.insert(scan.tangent_u.begin(), exit->u);
    }
    if (scan.tangent) {
      res.image = y;
      res.boundary_fixed_point = true;
      res.exit_u = scan.tangent_u.front();
      res.exit_point = curve.position(res.exit_u);
      res.exit_angle = dot(y - res.exit_point, eval_frame(curve, res.exit_u).normal) > 0.0 ? 0.0 : kPi;
      return res;
    }
    throw Error(ErrorCode::NotInAnnulus, "Larmor circle about (" + std::to_string(y.x) + ", " +
                                             std::to_string(y.y) + ") misses the table");
  }
  if (outward > 1) {
    throw Error(ErrorCode::NoExitFound, "Larmor circle leaves the table " + std::to_string(outward) + " times");
  }
  if (std::abs(exit->crossing_sine) < kGrazingSine) {
    throw Error(ErrorCode::GrazingIntersection, "exit crossing sine " + std::to_string(exit->crossing_sine));
  }
  const FrameSample f = eval_frame(curve, exit->u);
  const Vec2 w = J(normalized(exit->point - y));
  const double eps = exit_angle_of(w, f);
  res.exit_u = exit->u;
  res.exit_point = exit->point;
  res.exit_angle = eps;
  res.image = exit->point + field.r * J(rotate(f.tangent, eps));
  return res;
}

CenterPoint center_map_M(const PlaneCurve& curve, const FieldParams& field, CenterPoint y) {
  return center_map_detail(curve, field, y).image;
}

std::vector<BoundaryState> trajectory(const PlaneCurve& curve, const FieldParams& field,
                                      const BoundaryState& start, std::size_t n_steps) {
  std::vector<BoundaryState> out;
  out.reserve(n_steps + 1);
  out.push_back(start);
  for (std::size_t i = 0; i < n_steps; ++i) {
    try {
      out.push_back(billiard_map_B(curve, field, out.back()));
    } catch (const Error& e) {
      throw StepError(e, i);
    }
  }
  return out;
}

std::vector<CenterPoint> center_trajectory(const PlaneCurve& curve, const FieldParams& field,
                                           CenterPoint start, std::size_t n_steps) {
  std::vector<CenterPoint> out;
  out.reserve(n_steps + 1);
  out.push_back(start);
  for (std::size_t i = 0; i < n_steps; ++i) {
    try {
      out.push_back(center_map_M(curve, field, out.back()));
    } catch (const Error& e) {
      throw StepError(e, i);
    }
  }
  return out;
}

double circle_integral_h(Vec2 x, Vec2 v, double beta) {
  return x.x * x.x + x.y * x.y + (2.0 / beta) * (v.x * x.y - v.y * x.x);
}

double jacobian_det_M(const PlaneCurve& curve, const FieldParams& field, CenterPoint y, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidConfig, "stencil step must be positive");
  auto image = [&](Vec2 p) {
    CenterMapResult res;
    try {
      res = center_map_detail(curve, field, p);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotInAnnulus) throw Error(ErrorCode::StencilOutOfDomain, e.what());
      throw;
    }
    if (res.boundary_fixed_point) {
      throw Error(ErrorCode::StencilOutOfDomain, "stencil point on the annulus boundary");
    }
    return res.image;
  };
  const Vec2 dx = (image(y + Vec2{h, 0.0}) - image(y - Vec2{h, 0.0})) / (2.0 * h);
  const Vec2 dy = (image(y + Vec2{0.0, h}) - image(y - Vec2{0.0, h})) / (2.0 * h);
  return cross(dx, dy);
}

}  // namespace magbill
