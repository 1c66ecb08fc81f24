#include <magbill/errors.hpp>
#include <magbill/integrability.hpp>

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace magbill;
using doctest::Approx;
using P = BivariatePolynomial;

namespace {

void check_code(ErrorCode expected, const std::function<void()>& f) {
  try {
    f();
    FAIL("no error thrown");
  } catch (const Error& e) {
    CHECK(e.code() == expected);
  }
}

const P X2 = P::monomial(2, 0), Y2 = P::monomial(0, 2);

// Closed-form inward offset of the ellipse (a cos u, b sin u).
Vec2 ellipse_offset(double a, double b, double u, double t) {
  const Vec2 tan{-a * std::sin(u), b * std::cos(u)};
  return Vec2{a * std::cos(u), b * std::sin(u)} + t * J(tan) / norm(tan);
}

}  // namespace

TEST_CASE("H operator") {
  CHECK(H_operator(X2 + Y2, {1, 0}) == Approx(8.0));
  CHECK(H_operator(P::y(), {0.3, -2.0}) == Approx(0.0));
  CHECK(H_operator(P::monomial(1, 1), {1, 1}) == Approx(-2.0));
}

TEST_CASE("level-set curvature") {
  CHECK(implicit_curvature(X2 + Y2 - 1.0, {1, 0}) == Approx(1.0));
  CHECK(implicit_curvature(P::y() - X2, {0, 0}) == Approx(-2.0));
  const PlaneCurve e = PlaneCurve::ellipse(2.0, 1.0);
  const double k = implicit_curvature(0.25 * X2 + Y2 - 1.0, {2, 0});
  CHECK(std::abs(k) == Approx(eval_frame(e, 0.0).curvature).epsilon(1e-12));
  check_code(ErrorCode::SingularPoint, [] { implicit_curvature(X2 + Y2, {0, 0}); });
}

TEST_CASE("constancy on the circle table") {
  std::vector<Vec2> pts;
  for (int i = 0; i < 128; ++i) pts.push_back(0.75 * unit(kTwoPi * i / 128));
  const ConstancyResidual c = residual_equation13(X2 + Y2 - 0.5625, pts, 4.0, +1);
  CHECK(c.mean == Approx(18.0).epsilon(1e-13));
  CHECK(c.max_deviation < 1e-10);
  CHECK(c.values.size() == 128);
  check_code(ErrorCode::SingularPoint, [&] { residual_equation13(P::constant(3.0), pts, 4.0, +1); });
}

TEST_CASE("ellipse offset polynomial is not constant-curvature") {
  const PlaneCurve e = PlaneCurve::ellipse(2.0, 1.0);
  const P f = ellipse_offset_poly(2.0, 1.0, 0.2);
  std::vector<Vec2> pts;
  for (int i = 0; i < 256; ++i) pts.push_back(offset_point(e, kTwoPi * (i + 0.5) / 256, 0.2));
  CHECK(residual_equation13(f, pts, 5.0, +1).relative_deviation() > 1e-3);
}

TEST_CASE("ellipse offset polynomial") {
  const P f = ellipse_offset_poly(2.0, 1.0, 0.2);
  CHECK(f.degree() == 8);
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; i + j <= 8; ++j)
      if (i % 2 || j % 2) CHECK(f.coeff(i, j) == 0.0);
  for (int k = 0; k < 64; ++k) {
    const double u = kTwoPi * k / 64;
    for (double t : {-0.2, 0.2}) CHECK(std::abs(f(ellipse_offset(2, 1, u, t))) < 1e-8 * f.max_abs_coeff());
  }
  const P g = ellipse_offset_poly(2.0, 1.0, 0.0);
  for (int k = 0; k < 512; ++k) {
    const double u = kTwoPi * k / 512;
    CHECK(std::abs(g(2 * std::cos(u), std::sin(u))) < 1e-10 * g.max_abs_coeff());
  }
}

TEST_CASE("ellipse offset singular points") {
  const auto pts = ellipse_offset_singularities(2.0, 1.0, 0.2);
  REQUIRE(pts.size() == 4);
  int real = 0;
  for (const auto& p : pts) {
    CHECK(p.value_relative < 1e-8);
    CHECK(p.gradient_relative < 1e-8);
    if (p.is_real) {
      ++real;
      CHECK(std::abs(p.point.x.real()) == Approx(std::sqrt(3.0) * std::sqrt(0.96)).epsilon(1e-12));
    } else {
      CHECK(std::abs(p.point.y.imag()) == Approx(std::sqrt(3.0) * std::sqrt(3.96) / 2).epsilon(1e-12));
      CHECK(std::abs(p.point.y.imag()) == Approx(1.7233688).epsilon(1e-7));
    }
  }
  CHECK(real == 2);
  check_code(ErrorCode::NotApplicable, [] { ellipse_offset_singularities(1.0, 1.0, 0.2); });
}

TEST_CASE("normalized integral") {
  const P F = X2 + Y2;
  const P N = normalize_integral(F, 1.0, 2.0);
  CHECK(N(1.0, 0.0) == Approx(0.0));
  CHECK(N(0.0, std::sqrt(2.0)) == Approx(0.0).epsilon(1e-14));
  CHECK(N(0.0, 0.0) == Approx(2.0));
  CHECK(normalize_integral(F, 0.0, 0.0) == F * F);
}

TEST_CASE("boundary constancy") {
  const PlaneCurve c = PlaneCurve::circle(1.0);
  const FieldParams f = FieldParams::from_beta(4.0);
  const BoundaryConstancy bc = boundary_constancy(X2 + Y2 - f.r * f.r, c, f);
  CHECK(bc.deviation_minus < 1e-12);
  CHECK(bc.deviation_plus < 1e-12);
  CHECK(bc.const_plus == Approx(0.5625 - 0.0625));
  CHECK(bc.const_minus == Approx(1.5625 - 0.0625));
  const BoundaryConstancy lin = boundary_constancy(P::x(), PlaneCurve::circle(2.0), FieldParams::from_beta(4.0));
  CHECK(lin.deviation_plus == Approx(2 * 1.75));
}

TEST_CASE("third-order coefficient against finite differences") {
  const PlaneCurve e = PlaneCurve::ellipse(2.0, 1.0);
  const FieldParams f = FieldParams::from_beta(5.0);
  for (const P& F : {P::monomial(3, 1), X2 - 0.3 * P::monomial(1, 2) + P::y(), ellipse_offset_poly(2, 1, 0.2)}) {
    for (double u : {0.4, 2.2, 5.1}) {
      for (int sign : {+1, -1}) {
        const Eps3Check c = eps3_check(F, e, f, u, sign);
        CHECK(c.relative_error() < 1e-4);
        CHECK(c.even_coefficient_max < 1e-8);
      }
    }
  }
}

TEST_CASE("reflection difference is odd") {
  const PlaneCurve e = PlaneCurve::ellipse(2.0, 1.0);
  const PolynomialJet jet(P::monomial(3, 1) + Y2);
  const Vec2 p = offset_point(e, 1.0, 0.2);
  CHECK(reflection_difference(jet, p, 0.2, +1, 0.0) == Approx(0.0));
  for (double eps : {1e-3, 1e-2, 5e-2}) {
    const double a = reflection_difference(jet, p, 0.2, +1, eps), b = reflection_difference(jet, p, 0.2, +1, -eps);
    CHECK(std::abs(a + b) <= 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("points at infinity") {
  SUBCASE("product of circles is isotropic") {
    const P F = (X2 + Y2 - 1.0) * (X2 + Y2 - 4.0);
    const InfinityReport r = infinity_analysis(F);
    CHECK(r.degree == 4);
    REQUIRE(r.points.size() == 2);
    for (const auto& p : r.points) {
      CHECK(p.kind == InfinityKind::Isotropic);
      CHECK(p.multiplicity == 2);
    }
    CHECK(r.trichotomy_holds());
  }
  SUBCASE("ellipse offset points are isotropic or singular") {
    const InfinityReport r = infinity_analysis(ellipse_offset_poly(2.0, 1.0, 0.2));
    CHECK(r.trichotomy_holds());
    int isotropic = 0;
    for (const auto& p : r.points) {
      CHECK(p.kind != InfinityKind::Transversal);
      if (p.kind == InfinityKind::Isotropic) ++isotropic;
    }
    CHECK(isotropic == 2);
  }
  SUBCASE("parabola is tangent to the line at infinity") {
    const InfinityReport r = infinity_analysis(X2 - P::y());
    REQUIRE(r.points.size() == 1);
    CHECK(std::abs(r.points[0].direction.x) < 1e-12);
    CHECK(std::abs(r.points[0].direction.y) == Approx(1.0));
    CHECK(r.points[0].kind == InfinityKind::Tangent);
  }
  SUBCASE("a hyperbola meets it transversally") {
    const InfinityReport r = infinity_analysis(P::monomial(1, 1) - 1.0);
    CHECK_FALSE(r.trichotomy_holds());
  }
  check_code(ErrorCode::DegenerateLeadingForm, [] { infinity_analysis(P()); });
  check_code(ErrorCode::NotApplicable, [] { infinity_analysis(P::x()); });
}
