#pragma once

#include <magbill/curve.hpp>
#include <magbill/larmor.hpp>

#include <string>
#include <vector>

namespace magbill {

struct GutkinParams {
  double delta = kPi / 2;  // incidence angle in (0, pi)
  double beta = 1.0;
  double r = 1.0;

  static GutkinParams make(double delta, double beta);
  FieldParams field() const { return {beta, r}; }
};

/// One delta-chord: the Larmor arc entering at u_entry with incidence delta,
/// and the reflection at its exit point Q.
///
/// In tangent angles the arc enters at phi_bar + d and leaves at phi_bar - d.
struct ChordRecord {
  double u_entry = 0.0, u_exit = 0.0;
  double phi_entry = 0.0, phi_exit = 0.0;
  double phi_bar = 0.0, d = 0.0;
  Vec2 entry_point, exit_point;
  double entry_angle = 0.0, exit_angle = 0.0;
  Vec2 p_minus;    // center of the entering arc
  Vec2 p_plus;     // center of the reflected arc at Q
  Vec2 midpoint;   // (p_minus + p_plus) / 2
  Vec2 tangency;   // Q + r n(Q), on the inner offset

  double chord_length() const { return distance(p_minus, p_plus); }
};

ChordRecord delta_chord(const PlaneCurve& curve, const FieldParams& field, double delta, double u_entry);

struct GutkinResidual {
  double max_deviation = 0.0;  // max |exit angle - delta|
  std::vector<Vec2> gamma;     // p_minus of every grid chord
  std::vector<ChordRecord> chords;
};

/// Shoots delta-chords from `grid` equally spaced entry parameters.
GutkinResidual gutkin_residual(const PlaneCurve& curve, const FieldParams& field, double delta, int grid);

struct Eq6Row {
  double phi_bar = 0.0;
  double d = 0.0;
  double residual = 0.0;  // |gamma(phi_bar + d) - gamma(phi_bar - d) - (2/beta) sin(delta + d) e^{i phi_bar}|
};

struct Eq6Report {
  double max_residual = 0.0;
  std::vector<Eq6Row> rows;
};

/// For each phi_bar on a uniform grid, finds the delta-chord whose mean tangent
/// angle is phi_bar and evaluates the chord identity in tangent angles.
/// Throws ChordSolveFailure when no chord can be bracketed.
Eq6Report eq6_residual(const PlaneCurve& curve, const FieldParams& field, double delta, int grid = 256);

/// Root of beta sin d = sin(delta + d) on (0, pi - delta).
double solve_d0(double delta, double beta);

/// Roots of n tan d = tan(n d) in (0, pi), poles of tan d excluded.
std::vector<double> gutkin_mode_roots(int n);

struct FirstOrderModes {
  double K = 0.0;            // cos(delta + d0)/beta - cos d0
  double amplitude_real = 0.0;  // from the real-part matching: cos d0 sin(n d0) / (n K)
  double amplitude_imag = 0.0;  // from the imaginary-part matching: sin d0 cos(n d0) / K
  double amplitude = 0.0;       // common value
  double d1_cos = 0.0, d1_sin = 0.0;  // d1 = d1_cos cos(n phi) + d1_sin sin(n phi)
};

/// Mode-n linearization of the chord identity about the circle: for
/// rho1 = rho1_cos cos(n phi) + rho1_sin sin(n phi) returns d1 = amplitude * rho1.
/// Throws DegenerateLinearization for K = 0 and InconsistentModes when the two
/// matchings disagree (n tan d0 != tan n d0) and rho1 != 0.
FirstOrderModes first_order_d1(int n, double d0, double delta, double beta, double rho1_cos, double rho1_sin);

struct PerturbationSeed {
  int n = 0;
  double d0 = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
};

struct GutkinConstruction {
  PlaneCurve curve;
  FieldParams field;
  PerturbationSeed seed;
  double d1_amplitude = 0.0;
  StrongFieldReport admissibility;
};

/// rho = 1 + epsilon cos(n phi) with beta = sin(delta + d0) / sin d0 for the
/// mode root d0 giving the largest positive beta.
GutkinConstruction perturbed_gutkin_curve(int n, double delta, double epsilon);

struct ZindlerRow {
  ChordRecord chord;
  double chord_length_error = 0.0;    // | |P-P+| - 2r sin delta |
  double tangency_error = 0.0;        // max | |P-P'|, |P'P+| - 2r sin(delta/2) |
  double isosceles_error = 0.0;       // same with the measured exit angle
  double midpoint_distance = 0.0;     // signed distance of the midpoint to the table, positive inside
  double midpoint_distance_error = 0.0;  // | midpoint_distance - r cos delta |
  double velocity_angle = 0.0;        // angle between midpoint velocity and chord, in [0, pi/2]
};

struct ZindlerReport {
  std::vector<ZindlerRow> rows;
  double max_chord_length_error = 0.0;
  double max_tangency_error = 0.0;
  double max_isosceles_error = 0.0;
  double max_midpoint_distance_error = 0.0;
  double max_abs_midpoint_distance = 0.0;
  double max_velocity_angle = 0.0;
};

/// Constant-chord diagnostics over `grid` (>= 512) delta-chords. The midpoint
/// velocity is a fourth-order periodic difference along the grid.
ZindlerReport zindler_report(const PlaneCurve& curve, const FieldParams& field, double delta, int grid = 512);

struct GammaInvariance {
  double max_distance_to_gamma = 0.0;   // max dist(M(P-), Gamma), refined from the polyline of P-
  double max_distance_to_p_plus = 0.0;  // max |M(P-) - P+|
};

GammaInvariance gamma_invariance_check(const PlaneCurve& curve, const FieldParams& field, double delta, int grid);

/// Distance from p to the closed polyline through `points`.
double distance_to_closed_polyline(Vec2 p, const std::vector<Vec2>& points);

struct RefinementOptions {
  int harmonics = 3;       // multiples k n, k <= harmonics, of the base mode
  int grid = 64;           // phi_bar samples
  double damping = 0.5;
  int max_iterations = 200;
  double tolerance = 1e-11;
};

struct RefinementResult {
  bool converged = false;
  int iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  FourierRhoShape shape;
  std::vector<double> d_cos, d_sin;  // d = d_cos[0] + sum_k d_cos[k] cos(k n phi) + d_sin[k] sin(k n phi)
  std::string message;
};

/// Experimental damped Gauss-Newton solve of the chord identity in Fourier
/// space, starting from the first-order construction. The base mode amplitude
/// and beta are held fixed. Failure to converge is reported, not thrown.
RefinementResult refine_gutkin_curve(const GutkinConstruction& seed, const RefinementOptions& options = {});

}  // namespace magbill
