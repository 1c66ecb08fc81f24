#pragma once

#include <magbill/curve.hpp>
#include <magbill/polynomial.hpp>

#include <complex>
#include <vector>

namespace magbill {

/// Derivatives of F up to third order at a point.
struct Jet {
  double f = 0, fx = 0, fy = 0;
  double fxx = 0, fxy = 0, fyy = 0;
  double fxxx = 0, fxxy = 0, fxyy = 0, fyyy = 0;

  double grad_norm() const { return std::hypot(fx, fy); }
};

/// F together with its partial derivatives up to order three, computed once.
class PolynomialJet {
 public:
  explicit PolynomialJet(BivariatePolynomial f);

  const BivariatePolynomial& polynomial() const { return f_; }
  Jet at(Vec2 p) const;

 private:
  BivariatePolynomial f_, fx_, fy_, fxx_, fxy_, fyy_, fxxx_, fxxy_, fxyy_, fyyy_;
};

/// F_xx F_y^2 - 2 F_xy F_x F_y + F_yy F_x^2.
double H_operator(const BivariatePolynomial& F, Vec2 p);
double H_operator(const Jet& j);

/// Signed curvature H(F)/|grad F|^3 of the level set through p.
/// Throws SingularPoint where |grad F| <= 1e-12 max|coeff|.
double implicit_curvature(const BivariatePolynomial& F, Vec2 p);

struct ConstancyResidual {
  std::vector<double> values;  // H(F) + sign * beta |grad F|^3 per sample
  double mean = 0.0;
  double max_deviation = 0.0;  // max |value - mean|
  /// min over samples of min(|kappa - beta|, |kappa + beta|), kappa = H/|grad F|^3.
  double curvature_margin = 0.0;

  double relative_deviation() const { return max_deviation / std::abs(mean); }
};

/// Constancy statistics of H(F) +- beta |grad F|^3 along `samples`.
/// `sign` is +1 or -1.
ConstancyResidual residual_equation13(const BivariatePolynomial& F, const std::vector<Vec2>& samples, double beta,
                                      int sign);

struct Eps3Check {
  Vec2 point;             // P' on the inner offset
  double analytic = 0.0;  // B1 + sign * 3 beta |grad F| B2
  double numeric = 0.0;   // third Taylor coefficient of Delta(eps), same normalization
  double bracket_third = 0.0;   // B1
  double bracket_second = 0.0;  // 3 beta |grad F| B2
  double even_coefficient_max = 0.0;

  double scale() const;
  double relative_error() const;
};

/// Compares the closed-form eps^3 coefficient of the reflection-invariance
/// condition at P' = offset_point(curve, u, +r) against a Richardson-extrapolated
/// odd finite difference of the exact difference Delta(eps).
Eps3Check eps3_check(const BivariatePolynomial& F, const PlaneCurve& curve, const FieldParams& field, double u,
                     int sign);

/// Delta(eps) of the reflection-invariance condition at `p` (exposed for tests).
double reflection_difference(const PolynomialJet& jet, Vec2 p, double r, int sign, double eps);

struct BoundaryConstancy {
  double const_minus = 0.0;  // mean of F on gamma_{-r}
  double const_plus = 0.0;   // mean of F on gamma_{+r}
  double deviation_minus = 0.0;  // max - min of F on gamma_{-r}
  double deviation_plus = 0.0;
};

BoundaryConstancy boundary_constancy(const BivariatePolynomial& F, const PlaneCurve& curve, const FieldParams& field,
                                     int samples = kDefaultGrid);

/// F^2 - (c1 + c2) F + c1 c2.
BivariatePolynomial normalize_integral(const BivariatePolynomial& F, double c1, double c2);

/// Degree-8 defining polynomial of the offsets at distance r of x^2/a^2 + y^2/b^2 = 1.
BivariatePolynomial ellipse_offset_poly(double a, double b, double r);

struct ComplexPoint {
  std::complex<double> x, y;
};

struct SingularPointCheck {
  ComplexPoint point;
  bool is_real = false;
  double value_relative = 0.0;     // |f| / sum |c||x|^i|y|^j
  double gradient_relative = 0.0;  // |grad f| / (magnitude of f_x and f_y monomials)
};

/// The four closed-form singular points of the ellipse offset curve, each
/// verified by complex evaluation of f, f_x, f_y. Throws NotApplicable for a == b.
std::vector<SingularPointCheck> ellipse_offset_singularities(double a, double b, double r);

enum class InfinityKind {
  Isotropic,    // (1 : +-i : 0)
  Singular,     // gradient of the homogenization vanishes
  Tangent,      // F~_x = F~_y = 0, F~_z != 0: the line at infinity is tangent
  Transversal,  // none of the above
};

const char* to_string(InfinityKind kind);

struct InfinitePoint {
  ComplexPoint direction;  // (x : y : 0), normalized to |x|^2 + |y|^2 = 1
  int multiplicity = 1;
  InfinityKind kind = InfinityKind::Transversal;
  double grad_xy = 0.0;  // |F~_x|^2 + |F~_y|^2 (complex squares summed in modulus)
  double grad_z = 0.0;   // |F~_z|
};

struct InfinityReport {
  int degree = 0;
  std::vector<InfinitePoint> points;

  /// True when every non-isotropic point is singular or tangent.
  bool trichotomy_holds() const;
};

/// Points where the projective closure of {F = 0} meets the line at infinity,
/// classified as isotropic, singular, tangent, or transversal.
InfinityReport infinity_analysis(const BivariatePolynomial& F);

}  // namespace magbill
