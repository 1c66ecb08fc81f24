#pragma once

#include <magbill/curve.hpp>

#include <cstddef>
#include <vector>

namespace magbill {

/// Footpoint parameter u on the table and the angle theta of the unit
/// velocity with the positive tangent; theta in (0, pi) points inward.
struct BoundaryState {
  double u = 0.0;
  double theta = 0.0;

  friend bool operator==(const BoundaryState&, const BoundaryState&) = default;
};

/// A Larmor center in the annulus of centers bounded by the +-r offsets.
using CenterPoint = Vec2;

struct ArcStep {
  BoundaryState entry;
  BoundaryState exit;      // reflected state at the exit footpoint; exit.theta == exit_angle
  Vec2 center;             // Larmor center of the arc
  Vec2 entry_point;
  Vec2 exit_point;
  Vec2 exit_velocity;      // before reflection, equals R_{-exit_angle} tangent
  double exit_angle = 0.0; // incidence angle at the exit, in (0, pi)
  double swept_angle = 0.0;
  double arc_length = 0.0;
};

struct CircleCrossing {
  double u = 0.0;             // table parameter
  Vec2 point;
  double circle_angle = 0.0;  // polar angle of point - center
  double crossing_sine = 0.0; // <w, n>, w the counterclockwise circle direction
  bool outward = false;       // counterclockwise motion leaves the table here
};

struct CrossingScan {
  std::vector<CircleCrossing> crossings;
  bool tangent = false;  // a touching (double) contact was detected
  std::vector<double> tangent_u;
};

/// All transversal crossings of the circle |y - center| = r with the table,
/// bracketed on the crossing grid and refined with TOMS 748. Pairs of roots
/// closer than one grid cell are recovered by refining grid extrema.
CrossingScan scan_circle_crossings(const PlaneCurve& curve, Vec2 center, double r);

/// x + r J v.
Vec2 larmor_center(Vec2 x, Vec2 v, double r);

/// v - 2 <n, v> n.
Vec2 reflect(Vec2 v, Vec2 n);

/// Unit velocity R_theta tangent(u).
Vec2 boundary_velocity(const PlaneCurve& curve, const BoundaryState& state);

ArcStep flow_step(const PlaneCurve& curve, const FieldParams& field, const BoundaryState& state);

BoundaryState billiard_map_B(const PlaneCurve& curve, const FieldParams& field, const BoundaryState& state);

struct CenterMapResult {
  Vec2 image;
  bool boundary_fixed_point = false;  // circle tangent to the table: y on gamma_{+-r}
  double exit_u = 0.0;
  Vec2 exit_point;
  double exit_angle = 0.0;
};

CenterMapResult center_map_detail(const PlaneCurve& curve, const FieldParams& field, CenterPoint y);

CenterPoint center_map_M(const PlaneCurve& curve, const FieldParams& field, CenterPoint y);

/// n_steps applications of B; the result holds n_steps + 1 states.
/// Failures are rethrown as StepError carrying the failing index.
std::vector<BoundaryState> trajectory(const PlaneCurve& curve, const FieldParams& field,
                                      const BoundaryState& start, std::size_t n_steps);

/// Same as trajectory() for the center map M.
std::vector<CenterPoint> center_trajectory(const PlaneCurve& curve, const FieldParams& field,
                                           CenterPoint start, std::size_t n_steps);

/// h(x, v) = |x|^2 + (2/beta)(v1 x2 - v2 x1), the circle-table integral.
double circle_integral_h(Vec2 x, Vec2 v, double beta);

/// Central-difference Jacobian determinant of M at y.
double jacobian_det_M(const PlaneCurve& curve, const FieldParams& field, CenterPoint y, double h);

}  // namespace magbill
