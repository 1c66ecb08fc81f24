#include <magbill/curve.hpp>
#include <magbill/errors.hpp>

#include "numeric.hpp"

#include <algorithm>
#include <complex>
#include <numeric>
#include <string>

namespace magbill {

double wrap_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

double wrap_pi(double angle) {
  double w = wrap_two_pi(angle);
  if (w > kPi) w -= kTwoPi;
  return w;
}

double FourierRhoShape::rho(double phi) const {
  double v = c0;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) v += cos_coeffs[k] * std::cos(double(k + 1) * phi);
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k) v += sin_coeffs[k] * std::sin(double(k + 1) * phi);
  return v;
}

double FourierRhoShape::rho_derivative(double phi) const {
  double v = 0.0;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
    const double m = double(k + 1);
    v -= m * cos_coeffs[k] * std::sin(m * phi);
  }
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k) {
    const double m = double(k + 1);
    v += m * sin_coeffs[k] * std::cos(m * phi);
  }
  return v;
}

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

// Antiderivative of rho(xi) e^{i xi} with every Fourier mode integrated
// without a constant term. Requires a vanishing first harmonic.
cplx rho_antiderivative(const FourierRhoShape& s, double phi) {
  cplx z = s.c0 * std::exp(kI * phi) / kI;
  const std::size_t n = std::max(s.cos_coeffs.size(), s.sin_coeffs.size());
  for (std::size_t idx = 1; idx < n; ++idx) {
    const double k = double(idx + 1);
    const double a = idx < s.cos_coeffs.size() ? s.cos_coeffs[idx] : 0.0;
    const double b = idx < s.sin_coeffs.size() ? s.sin_coeffs[idx] : 0.0;
    const cplx plus = 0.5 * cplx(a, -b);   // coefficient of e^{i(k+1)phi}
    const cplx minus = 0.5 * cplx(a, b);   // coefficient of e^{-i(k-1)phi}
    z += plus * std::exp(kI * ((k + 1.0) * phi)) / (kI * (k + 1.0));
    z += minus * std::exp(-kI * ((k - 1.0) * phi)) / (-kI * (k - 1.0));
  }
  return z;
}

}  // namespace

Vec2 FourierRhoShape::position(double phi) const { return from_complex(rho_antiderivative(*this, phi)); }

namespace {

double ellipse_curvature(const EllipseShape& e, double u) {
  const double s = std::sin(u), c = std::cos(u);
  const double q = e.a * e.a * s * s + e.b * e.b * c * c;
  return e.a * e.b / (q * std::sqrt(q));
}

double signed_curvature(const CurveShape& shape, double u) {
  return std::visit(
      [u](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CircleShape>) {
          return 1.0 / s.radius;
        } else if constexpr (std::is_same_v<T, EllipseShape>) {
          return ellipse_curvature(s, u);
        } else {
          const double rho = s.rho(u);
          if (rho <= 0.0) {
            throw Error(ErrorCode::NonConvexRepresentation,
                        "curvature radius " + std::to_string(rho) + " at phi=" + std::to_string(u));
          }
          return 1.0 / rho;
        }
      },
      shape);
}

double compute_max_abs_curvature(const CurveShape& shape) {
  constexpr int n = kDefaultGrid;
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = std::abs(signed_curvature(shape, kTwoPi * i / n));
  double best = *std::max_element(k.begin(), k.end());
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    const double prev = k[(i + n - 1) % n], next = k[(i + 1) % n];
    if (k[i] < prev || k[i] < next) continue;
    const double u0 = kTwoPi * i / n;
    const auto [u, negk] = detail::minimize(
        [&](double u) { return -std::abs(signed_curvature(shape, u)); }, u0 - h, u0 + h);
    best = std::max(best, -negk);
  }
  return best;
}

}  // namespace

PlaneCurve::PlaneCurve(CurveShape shape) : shape_(std::make_shared<const CurveShape>(std::move(shape))) {
  auto grid = std::make_shared<std::vector<Vec2>>(kCrossingGrid);
  for (int i = 0; i < kCrossingGrid; ++i) (*grid)[i] = position(kTwoPi * i / kCrossingGrid);
  grid_ = grid;

  double diam = 0.0;
  for (int i = 0; i < kCrossingGrid; i += 4)
    for (int j = i + 4; j < kCrossingGrid; j += 4) diam = std::max(diam, distance((*grid)[i], (*grid)[j]));
  diameter_ = diam;
  max_abs_curvature_ = compute_max_abs_curvature(*shape_);
}

PlaneCurve PlaneCurve::circle(double radius, Vec2 center) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "circle radius must be positive");
  return PlaneCurve(CircleShape{radius, center});
}

PlaneCurve PlaneCurve::ellipse(double a, double b) {
  if (!(b > 0.0) || a < b) throw Error(ErrorCode::InvalidConfig, "ellipse needs a >= b > 0");
  return PlaneCurve(EllipseShape{a, b});
}

PlaneCurve PlaneCurve::fourier_rho(FourierRhoShape shape) { return PlaneCurve(std::move(shape)); }

Vec2 PlaneCurve::position(double u) const {
  return std::visit(
      [u](const auto& s) -> Vec2 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CircleShape>) {
          return s.center + s.radius * unit(u);
        } else if constexpr (std::is_same_v<T, EllipseShape>) {
          return {s.a * std::cos(u), s.b * std::sin(u)};
        } else {
          return from_complex(rho_antiderivative(s, u));
        }
      },
      *shape_);
}

Vec2 PlaneCurve::velocity(double u) const {
  return std::visit(
      [u](const auto& s) -> Vec2 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CircleShape>) {
          return s.radius * Vec2{-std::sin(u), std::cos(u)};
        } else if constexpr (std::is_same_v<T, EllipseShape>) {
          return {-s.a * std::sin(u), s.b * std::cos(u)};
        } else {
          return s.rho(u) * unit(u);
        }
      },
      *shape_);
}

double PlaneCurve::tangent_angle(double u) const {
  return std::visit(
      [u](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CircleShape>) {
          return wrap_two_pi(u + 0.5 * kPi);
        } else if constexpr (std::is_same_v<T, EllipseShape>) {
          return wrap_two_pi(std::atan2(s.b * std::cos(u), -s.a * std::sin(u)));
        } else {
          return wrap_two_pi(u);
        }
      },
      *shape_);
}

double PlaneCurve::parameter_at_tangent_angle(double phi) const {
  return std::visit(
      [phi](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CircleShape>) {
          return wrap_two_pi(phi - 0.5 * kPi);
        } else if constexpr (std::is_same_v<T, EllipseShape>) {
          return wrap_two_pi(std::atan2(-std::cos(phi) / s.a, std::sin(phi) / s.b));
        } else {
          return wrap_two_pi(phi);
        }
      },
      *shape_);
}

FieldParams FieldParams::from_beta(double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidConfig, "beta must be positive");
  return {beta, 1.0 / beta};
}

FrameSample eval_frame(const PlaneCurve& curve, double u) {
  FrameSample f;
  f.u = u;
  f.curvature = signed_curvature(curve.shape(), u);
  f.point = curve.position(u);
  if (curve.is_fourier_rho()) {
    f.tangent = unit(u);
  } else {
    f.tangent = normalized(curve.velocity(u));
  }
  f.normal = J(f.tangent);
  return f;
}

Vec2 offset_point(const PlaneCurve& curve, double u, double t) {
  if (std::abs(t) * curve.max_abs_curvature() >= 1.0) {
    throw Error(ErrorCode::OffsetTooLarge,
                "|t|=" + std::to_string(std::abs(t)) + " >= 1/max|k|=" + std::to_string(1.0 / curve.max_abs_curvature()));
  }
  const FrameSample f = eval_frame(curve, u);
  return f.point + t * f.normal;
}

double offset_curvature(const PlaneCurve& curve, double u, double t) {
  const double k = signed_curvature(curve.shape(), u);
  const double denom = 1.0 - t * k;
  if (denom <= 0.0) {
    throw Error(ErrorCode::FocalPointCrossed, "1 - t k = " + std::to_string(denom) + " at u=" + std::to_string(u));
  }
  return k / denom;
}

double max_abs_curvature(const PlaneCurve& curve) { return curve.max_abs_curvature(); }

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

}  // namespace

bool polyline_self_intersects(const std::vector<Vec2>& pts) {
  const std::size_t n = pts.size();
  if (n < 4) return false;
  struct Seg {
    double xmin, xmax, ymin, ymax;
    std::size_t i;
  };
  std::vector<Seg> segs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = pts[i], b = pts[(i + 1) % n];
    segs[i] = {std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y), i};
  }
  std::sort(segs.begin(), segs.end(), [](const Seg& s, const Seg& t) { return s.xmin < t.xmin; });
  std::vector<const Seg*> active;
  for (const Seg& s : segs) {
    std::erase_if(active, [&](const Seg* a) { return a->xmax < s.xmin; });
    for (const Seg* a : active) {
      const std::size_t d = a->i > s.i ? a->i - s.i : s.i - a->i;
      if (d <= 1 || d == n - 1) continue;
      if (a->ymax < s.ymin || s.ymax < a->ymin) continue;
      if (segments_cross(pts[a->i], pts[(a->i + 1) % n], pts[s.i], pts[(s.i + 1) % n])) return true;
    }
    active.push_back(&s);
  }
  return false;
}

StrongFieldReport check_strong_field(const PlaneCurve& curve, const FieldParams& field) {
  StrongFieldReport rep;
  rep.r_times_max_curvature = field.r * curve.max_abs_curvature();
  rep.curvature_ok = rep.r_times_max_curvature < 0.5;

  bool simple = true;
  bool skipped = false;
  std::vector<Vec2> poly(kCrossingGrid);
  for (int level = -4; level <= 4; ++level) {
    const double t = 0.5 * level * field.r;
    if (std::abs(t) * curve.max_abs_curvature() >= 1.0) {
      skipped = true;
      continue;
    }
    for (int i = 0; i < kCrossingGrid; ++i) poly[i] = offset_point(curve, kTwoPi * i / kCrossingGrid, t);
    ++rep.offsets_checked;
    if (polyline_self_intersects(poly)) simple = false;
  }
  rep.offsets_simple = simple && !skipped;
  return rep;
}

PlaneCurve curve_from_rho(double c0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
  const double first_cos = cos_coeffs.empty() ? 0.0 : cos_coeffs[0];
  const double first_sin = sin_coeffs.empty() ? 0.0 : sin_coeffs[0];
  if (first_cos != 0.0 || first_sin != 0.0) {
    throw Error(ErrorCode::NotClosed, "first harmonic of rho must vanish for a closed curve");
  }
  FourierRhoShape shape{c0, std::move(cos_coeffs), std::move(sin_coeffs)};

  constexpr int n = 4096;
  double min_rho = shape.rho(0.0);
  int arg = 0;
  for (int i = 1; i < n; ++i) {
    const double v = shape.rho(kTwoPi * i / n);
    if (v < min_rho) {
      min_rho = v;
      arg = i;
    }
  }
  const double h = kTwoPi / n;
  const double u0 = kTwoPi * arg / n;
  min_rho = std::min(min_rho, detail::minimize([&](double u) { return shape.rho(u); }, u0 - h, u0 + h).second);
  if (min_rho <= 0.0) {
    throw Error(ErrorCode::NonConvexRepresentation, "rho attains " + std::to_string(min_rho));
  }
  return PlaneCurve::fourier_rho(std::move(shape));
}

NearestPoint nearest_point(const PlaneCurve& curve, Vec2 p) {
  const auto& grid = curve.crossing_grid();
  const int n = int(grid.size());
  int best = 0;
  double bestd = norm2(grid[0] - p);
  for (int i = 1; i < n; ++i) {
    const double d = norm2(grid[i] - p);
    if (d < bestd) {
      bestd = d;
      best = i;
    }
  }
  const double h = kTwoPi / n;
  const double u0 = kTwoPi * best / n;
  const auto [u, d2] = detail::minimize([&](double u) { return norm2(curve.position(u) - p); }, u0 - h, u0 + h);
  NearestPoint np;
  np.u = wrap_two_pi(u);
  const FrameSample f = eval_frame(curve, np.u);
  np.point = f.point;
  const double dist = std::sqrt(std::max(d2, 0.0));
  np.signed_distance = dot(p - f.point, f.normal) >= 0.0 ? dist : -dist;
  return np;
}

}  // namespace magbill
