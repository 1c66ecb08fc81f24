#include <magbill/errors.hpp>
#include <magbill/gutkin.hpp>

#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>

using namespace magbill;
using doctest::Approx;

namespace {

void check_code(ErrorCode expected, const std::function<void()>& f) {
  try {
    f();
    FAIL("no error thrown");
  } catch (const Error& e) {
    CHECK(e.code() == expected);
  }
}

}  // namespace

TEST_CASE("d0 from the chord geometry") {
  CHECK(solve_d0(kPi / 2, 1.0) == Approx(kPi / 4).epsilon(1e-14));
  for (double beta : {2.0, 5.0, 10.0}) CHECK(std::tan(solve_d0(kPi / 2, beta)) == Approx(1.0 / beta).epsilon(1e-13));
  CHECK(solve_d0(kPi / 3, 10.0) < solve_d0(kPi / 3, 5.0));
  for (double delta : {0.4, 1.1, 2.5}) {
    const double d = solve_d0(delta, 4.0);
    CHECK(4.0 * std::sin(d) == Approx(std::sin(delta + d)).epsilon(1e-13));
  }
  check_code(ErrorCode::NoSolution, [] { solve_d0(kPi / 2, -1.0); });
}

TEST_CASE("mode roots") {
  CHECK(gutkin_mode_roots(2).empty());
  CHECK(gutkin_mode_roots(3).empty());
  const auto r4 = gutkin_mode_roots(4);
  REQUIRE(r4.size() == 2);
  CHECK(r4[0] == Approx(std::atan(std::sqrt(5.0))).epsilon(1e-12));
  CHECK(r4[1] == Approx(kPi - std::atan(std::sqrt(5.0))).epsilon(1e-12));
  const auto r5 = gutkin_mode_roots(5);
  REQUIRE(r5.size() >= 2);
  CHECK(r5.front() == Approx(std::atan(std::sqrt(5.0 / 3.0))).epsilon(1e-12));
  CHECK(r5.back() == Approx(kPi - std::atan(std::sqrt(5.0 / 3.0))).epsilon(1e-12));
  CHECK(r5.front() == Approx(0.911738).epsilon(1e-6));
  for (int n : {4, 6, 7, 9})
    for (double d : gutkin_mode_roots(n)) CHECK(n * std::tan(d) == Approx(std::tan(n * d)).epsilon(1e-8));
}

TEST_CASE("first-order modes") {
  const double d0 = std::atan(std::sqrt(5.0)), delta = kPi / 2, beta = std::sin(delta + d0) / std::sin(d0);
  const FirstOrderModes m = first_order_d1(4, d0, delta, beta, 1.0, 0.0);
  CHECK(m.amplitude_real == Approx(m.amplitude_imag).epsilon(1e-10));
  CHECK(m.d1_cos == Approx(m.amplitude));
  CHECK(m.d1_sin == Approx(0.0));
  // undifferentiated chord identity at first order: the e^{i(n+1)phi} and
  // e^{i(1-n)phi} components each fix the same amplitude
  const double K = std::cos(delta + d0) / beta - std::cos(d0);
  CHECK(m.K == Approx(K));
  const double plus = std::sin(5 * d0) / (5 * K), minus = std::sin(3 * d0) / (3 * K);
  CHECK(plus == Approx(minus).epsilon(1e-10));
  CHECK(std::abs(m.amplitude) == Approx(std::abs(plus)).epsilon(1e-10));

  const FirstOrderModes zero = first_order_d1(4, d0, delta, beta, 0.0, 0.0);
  CHECK(zero.d1_cos == 0.0);
  CHECK(zero.d1_sin == 0.0);
  check_code(ErrorCode::InconsistentModes, [&] { first_order_d1(2, 0.7, delta, 1.0 / std::tan(0.7), 1.0, 0.0); });
}

TEST_CASE("perturbed construction") {
  const GutkinConstruction g0 = perturbed_gutkin_curve(4, kPi / 2, 0.0);
  CHECK(gutkin_residual(g0.curve, g0.field, kPi / 2, 128).max_deviation < 1e-9);
  CHECK(g0.seed.beta == Approx(1.0 / std::sqrt(5.0)).epsilon(1e-10));
  check_code(ErrorCode::NoSolution, [] { perturbed_gutkin_curve(3, kPi / 2, 0.01); });

  const GutkinConstruction g1 = perturbed_gutkin_curve(4, kPi / 2, 0.01), g2 = perturbed_gutkin_curve(4, kPi / 2, 0.005);
  const double q = gutkin_residual(g1.curve, g1.field, kPi / 2, 128).max_deviation /
                   gutkin_residual(g2.curve, g2.field, kPi / 2, 128).max_deviation;
  CHECK(q > 3.6);
  CHECK(q < 4.4);
  CHECK_FALSE(g1.admissibility.pass());
}

TEST_CASE("chords on the circle table") {
  const PlaneCurve c = PlaneCurve::circle(1.0);
  const FieldParams f = FieldParams::from_beta(4.0);
  for (double delta : {kPi / 6, kPi / 3, kPi / 2, 3 * kPi / 4}) {
    CHECK(gutkin_residual(c, f, delta, 64).max_deviation < 1e-9);
    for (double u : {0.0, 1.3, 4.0}) {
      const ChordRecord ch = delta_chord(c, f, delta, u);
      CHECK(ch.exit_angle == Approx(delta).epsilon(1e-10));
      CHECK(ch.d == Approx(solve_d0(delta, 4.0)).epsilon(1e-10));
      CHECK(ch.chord_length() == Approx(2 * f.r * std::sin(delta)).epsilon(1e-10));
    }
  }
}

TEST_CASE("chord identity") {
  const PlaneCurve unit = curve_from_rho(1.0, {}, {});
  const FieldParams f = FieldParams::from_beta(3.0);
  CHECK(eq6_residual(unit, f, 1.0, 64).max_residual < 1e-12);
  const PlaneCurve oval = curve_from_rho(1.0, {0.0, 0.25}, {});
  CHECK(eq6_residual(oval, FieldParams::from_beta(6.0), kPi / 3, 64).max_residual > 1e-4);
}

TEST_CASE("ellipse is not a Gutkin table") {
  const PlaneCurve e = PlaneCurve::ellipse(2.0, 1.0);
  const FieldParams f = FieldParams::from_beta(5.0);
  CHECK(gutkin_residual(e, f, kPi / 3, 128).max_deviation > 1e-3);
  CHECK(gamma_invariance_check(e, f, kPi / 3, 128).max_distance_to_gamma > 1e-3);
}

TEST_CASE("constant-chord diagnostics") {
  const PlaneCurve c = PlaneCurve::circle(1.0);
  const FieldParams f = FieldParams::from_beta(4.0);
  const ZindlerReport z = zindler_report(c, f, kPi / 3, 512);
  CHECK(z.rows.size() == 512);
  CHECK(z.max_chord_length_error < 1e-8);
  CHECK(z.max_tangency_error < 1e-8);
  CHECK(z.max_isosceles_error < 1e-8);
  CHECK(z.max_midpoint_distance_error < 1e-8);
  CHECK(z.max_velocity_angle < 1e-8);
  CHECK(zindler_report(c, f, kPi / 2, 512).max_abs_midpoint_distance < 1e-6);
  check_code(ErrorCode::InvalidConfig, [&] { zindler_report(c, f, kPi / 3, 128); });

  const GammaInvariance gi = gamma_invariance_check(c, f, kPi / 3, 64);
  CHECK(gi.max_distance_to_gamma < 1e-8);
  CHECK(gi.max_distance_to_p_plus < 1e-8);
}

TEST_CASE("polyline distance") {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(distance_to_closed_polyline({0.5, 0.2}, sq) == Approx(0.2));
  CHECK(distance_to_closed_polyline({2.0, 0.5}, sq) == Approx(1.0));
  CHECK(distance_to_closed_polyline({-0.5, 0.5}, sq) == Approx(0.5));
}

TEST_CASE("refinement reports its outcome") {
  const GutkinConstruction g = perturbed_gutkin_curve(4, kPi / 2, 0.01);
  RefinementOptions opt;
  opt.max_iterations = 5;
  const RefinementResult r = refine_gutkin_curve(g, opt);
  CHECK(r.iterations <= 5);
  CHECK(r.final_residual <= r.initial_residual);
  CHECK_FALSE(r.message.empty());
}
