#include <magbill/circles.hpp>
#include <magbill/errors.hpp>

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

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

}  // namespace

TEST_CASE("trigonometric degree on circles") {
  const auto r2 = [](Vec2 p) { return p.x * p.x + p.y * p.y; };
  for (int N : {1, 2, 5}) CHECK(circle_fourier_degree_test(CircleSampleSet::sample(r2, {0.7, 0}, 0.3, 64), N).passed);
  const CircleSampleSet s = CircleSampleSet::sample(r2, {0.7, 0}, 0.3, 64);
  const FourierDegreeResult d = circle_fourier_degree_test(s, 1);
  // x^2 + y^2 = a^2 + r^2 + 2 a r cos t
  CHECK(d.magnitudes[0] == Approx(0.49 + 0.09));
  CHECK(d.magnitudes[1] == Approx(0.7 * 0.3));

  const auto x3 = [](Vec2 p) { return p.x * p.x * p.x; };
  const CircleSampleSet c = CircleSampleSet::sample(x3, {0.2, -0.5}, 0.4, 64);
  CHECK(circle_fourier_degree_test(c, 3).passed);
  CHECK_FALSE(circle_fourier_degree_test(c, 2).passed);
}

TEST_CASE("exponential is not a trigonometric polynomial") {
  const Vec2 c{1.0, 0.0};
  const double rho = 3.0;
  const CircleSampleSet s = CircleSampleSet::sample([](Vec2 p) { return std::exp(p.x); }, c, rho, 64);
  for (int N = 0; N <= 10; ++N) {
    const FourierDegreeResult d = circle_fourier_degree_test(s, N);
    CHECK_FALSE(d.passed);
    CHECK(d.tail_max == Approx(std::exp(c.x) * std::cyl_bessel_i(double(N + 1), rho)).epsilon(1e-9));
  }
}

TEST_CASE("degree test input validation") {
  const CircleSampleSet s = CircleSampleSet::sample([](Vec2) { return 1.0; }, {0, 0}, 1.0, 48);
  check_code(ErrorCode::InvalidConfig, [&] { circle_fourier_degree_test(s, 2); });
  const CircleSampleSet t = CircleSampleSet::sample([](Vec2) { return 1.0; }, {0, 0}, 1.0, 16);
  check_code(ErrorCode::InvalidConfig, [&] { circle_fourier_degree_test(t, 4); });
  CHECK(circle_fourier_degree_test(t, 3).passed);
}

TEST_CASE("chord recursion") {
  const double r = 0.3;
  SUBCASE("zero seeds stay zero") {
    const ChordRecursionResult res = fourier_chord_recursion({}, 0.2, r, 2, 0.0, 0.0, 32);
    for (auto g : res.g) CHECK(std::abs(g) == 0.0);
    CHECK(res.decaying);
  }
  SUBCASE("unit seed gives a non-decaying tail") {
    const double a = 0.2;
    const double alpha = std::acos(-a / (2 * r));
    const ChordRecursionResult res = fourier_chord_recursion({}, a, r, 2, 1.0, std::cos(alpha), 64);
    CHECK_FALSE(res.decaying);
    CHECK(res.alpha == Approx(alpha));
    // with g_N = 1 and g_{N+1} = cos(alpha) the tail is cos(l alpha)
    for (std::size_t l = 0; l < res.g.size(); ++l) CHECK(res.g[l].real() == Approx(std::cos(double(l) * alpha)).epsilon(1e-9));
  }
  SUBCASE("a = r gives a third of a turn") {
    const ChordRecursionResult res = fourier_chord_recursion({}, r, r, 1, 1.0, 0.0);
    CHECK(res.alpha == Approx(2 * kPi / 3).epsilon(1e-12));
    CHECK(std::abs(res.lambda_plus) == Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(res.lambda_minus) == Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("forcing terms enter through f_k / a") {
    const std::vector<std::complex<double>> f{0.0, 0.0, 0.0, 0.5};
    const ChordRecursionResult res = fourier_chord_recursion(f, 0.2, r, 2, 0.0, 0.0, 4);
    // r g_4 + a g_3 + r g_2 = f_3 / a
    CHECK(res.g[2].real() == Approx(0.5 / 0.2 / r));
  }
  check_code(ErrorCode::ConcentricDegenerate, [] { fourier_chord_recursion({}, 0.0, 0.3, 1, 1.0, 0.0); });
  check_code(ErrorCode::RootsOffUnitCircle, [] { fourier_chord_recursion({}, 0.6, 0.3, 1, 1.0, 0.0); });
}

TEST_CASE("global polynomial fit") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const P quartic = P::from_terms({{4, 0, 1.0}, {2, 2, -0.5}, {1, 1, 2.0}, {0, 3, 0.3}, {0, 0, -1.0}});
  std::vector<Vec2> pts;
  std::vector<double> vals, expv;
  for (int i = 0; i < 400; ++i) {
    const double rad = 3.0 + 3.0 * U(rng), ang = kTwoPi * U(rng);
    pts.push_back(rad * unit(ang));
    vals.push_back(quartic(pts.back()));
    expv.push_back(std::exp(pts.back().x));
  }
  const PolyFitResult exact = global_poly_fit(pts, vals, 4);
  CHECK(exact.relative_residual < 1e-10);
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) CHECK(exact.polynomial.coeff(i, j) == Approx(quartic.coeff(i, j)).epsilon(1e-8).scale(1.0));

  const PolyFitResult ex = global_poly_fit(pts, expv, 8);
  CHECK(ex.relative_residual > 1e-4);

  check_code(ErrorCode::InvalidConfig, [&] { global_poly_fit({pts.begin(), pts.begin() + 10}, {vals.begin(), vals.begin() + 10}, 4); });
  std::vector<Vec2> line;
  for (int i = 0; i < 100; ++i) line.push_back({0.01 * i, 0.0});
  check_code(ErrorCode::IllConditionedFit, [&] { global_poly_fit(line, std::vector<double>(100, 1.0), 2); });
}

TEST_CASE("circle pipeline") {
  const PlaneCurve e = PlaneCurve::ellipse(2.0, 1.0);
  const FieldParams f = FieldParams::from_beta(5.0);
  const P cubic = P::from_terms({{3, 0, 0.4}, {2, 1, 2.0}, {0, 3, -0.7}, {1, 1, 1.1}, {0, 0, 0.3}});
  const CirclePipelineReport rep = circle_pipeline([&](Vec2 p) { return cubic(p); }, e, f, 3);
  CHECK(rep.all_circles_pass);
  CHECK(rep.circles.size() == 32);
  CHECK(rep.fit.max_residual < 1e-9);
  const CirclePipelineReport low = circle_pipeline([&](Vec2 p) { return cubic(p); }, e, f, 2);
  CHECK_FALSE(low.all_circles_pass);
}
