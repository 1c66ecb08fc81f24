#pragma once

#include <magbill/constants.hpp>
#include <magbill/vec2.hpp>

#include <memory>
#include <variant>
#include <vector>

namespace magbill {

struct CircleShape {
  double radius = 1.0;
  Vec2 center{};
};

struct EllipseShape {
  double a = 1.0;  // semi-major, along x
  double b = 1.0;  // semi-minor, along y
};

/// Convex curve given by its curvature radius as a function of the tangent
/// angle phi: rho(phi) = c0 + sum_k cos_coeffs[k-1] cos(k phi) + sin_coeffs[k-1] sin(k phi).
/// The curve parameter is phi itself.
struct FourierRhoShape {
  double c0 = 1.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  double rho(double phi) const;
  double rho_derivative(double phi) const;
  /// Closed-form integral of rho(xi) e^{i xi}, so rho == 1 gives (sin phi, -cos phi).
  Vec2 position(double phi) const;
};

using CurveShape = std::variant<CircleShape, EllipseShape, FourierRhoShape>;

struct FrameSample {
  double u = 0.0;
  Vec2 point;
  Vec2 tangent;  // unit
  Vec2 normal;   // J * tangent; inward for counterclockwise curves
  double curvature = 0.0;
};

/// Closed counterclockwise C^2 table boundary, parameterized over [0, 2pi).
///
/// Instances are immutable. Construction samples the curve once to cache the
/// maximal absolute curvature, the diameter, and a crossing grid.
class PlaneCurve {
 public:
  static PlaneCurve circle(double radius, Vec2 center = {});
  static PlaneCurve ellipse(double a, double b);
  /// Prefer curve_from_rho(); this assumes the shape was already validated.
  static PlaneCurve fourier_rho(FourierRhoShape shape);

  const CurveShape& shape() const { return *shape_; }
  bool is_circle() const { return std::holds_alternative<CircleShape>(*shape_); }
  bool is_ellipse() const { return std::holds_alternative<EllipseShape>(*shape_); }
  bool is_fourier_rho() const { return std::holds_alternative<FourierRhoShape>(*shape_); }

  Vec2 position(double u) const;
  /// d(position)/du.
  Vec2 velocity(double u) const;
  /// Unwrapped-free tangent direction angle in [0, 2pi).
  double tangent_angle(double u) const;
  /// Parameter u whose tangent angle equals `phi` (convex curves).
  double parameter_at_tangent_angle(double phi) const;
  /// Length element |d(position)/du|.
  double speed(double u) const { return norm(velocity(u)); }

  double max_abs_curvature() const { return max_abs_curvature_; }
  double diameter() const { return diameter_; }

  /// Positions at u_i = 2 pi i / kCrossingGrid.
  const std::vector<Vec2>& crossing_grid() const { return *grid_; }

 private:
  explicit PlaneCurve(CurveShape shape);

  std::shared_ptr<const CurveShape> shape_;
  std::shared_ptr<const std::vector<Vec2>> grid_;
  double max_abs_curvature_ = 0.0;
  double diameter_ = 0.0;
};

struct FieldParams {
  double beta = 1.0;  // magnetic magnitude, 1/length
  double r = 1.0;     // Larmor radius = 1/beta

  static FieldParams from_beta(double beta);
};

FrameSample eval_frame(const PlaneCurve& curve, double u);

/// gamma(u) + t n(u). Positive t offsets inward.
Vec2 offset_point(const PlaneCurve& curve, double u, double t);

/// Curvature of the parallel curve at distance t: k / (1 - t k).
double offset_curvature(const PlaneCurve& curve, double u, double t);

double max_abs_curvature(const PlaneCurve& curve);

struct StrongFieldReport {
  double r_times_max_curvature = 0.0;
  bool curvature_ok = false;     // r * max|k| < 1/2
  bool offsets_simple = false;   // no self-intersection on sampled offsets |t| <= 2r
  int offsets_checked = 0;
  bool pass() const { return curvature_ok && offsets_simple; }
};

StrongFieldReport check_strong_field(const PlaneCurve& curve, const FieldParams& field);

/// Build the closed curve with curvature radius rho(phi) in the tangent angle.
/// Throws NotClosed if the first harmonic is nonzero and NonConvexRepresentation
/// if rho is not positive everywhere.
PlaneCurve curve_from_rho(double c0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);

/// True if the closed polyline through `points` has two non-adjacent
/// segments that intersect.
bool polyline_self_intersects(const std::vector<Vec2>& points);

struct NearestPoint {
  double u = 0.0;
  Vec2 point;
  double signed_distance = 0.0;  // positive inside (along the inward normal)
};

/// Nearest point of the curve to `p`, by grid search and Brent refinement.
NearestPoint nearest_point(const PlaneCurve& curve, Vec2 p);

}  // namespace magbill
