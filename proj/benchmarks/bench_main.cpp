#include <magbill/gutkin.hpp>
#include <magbill/integrability.hpp>
#include <magbill/larmor.hpp>

#include <benchmark/benchmark.h>

using namespace magbill;

static void BM_FlowStepEllipse(benchmark::State& st) {
  const PlaneCurve e = PlaneCurve::ellipse(2.0, 1.0);
  const FieldParams f = FieldParams::from_beta(5.0);
  BoundaryState s{0.3, 1.1};
  for (auto _ : st) {
    s = billiard_map_B(e, f, s);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_FlowStepEllipse);

static void BM_CenterMapCircle(benchmark::State& st) {
  const PlaneCurve c = PlaneCurve::circle(1.0);
  const FieldParams f = FieldParams::from_beta(4.0);
  Vec2 y{0.9, 0.1};
  for (auto _ : st) {
    y = center_map_M(c, f, y);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_CenterMapCircle);

static void BM_EllipseOffsetPolyEval(benchmark::State& st) {
  const BivariatePolynomial p = ellipse_offset_poly(2.0, 1.0, 0.2);
  double x = 0.3;
  for (auto _ : st) {
    benchmark::DoNotOptimize(p(x, 0.7));
    x += 1e-9;
  }
}
BENCHMARK(BM_EllipseOffsetPolyEval);

static void BM_GutkinResidual(benchmark::State& st) {
  const PlaneCurve c = PlaneCurve::circle(1.0);
  const FieldParams f = FieldParams::from_beta(4.0);
  for (auto _ : st) benchmark::DoNotOptimize(gutkin_residual(c, f, kPi / 3, int(st.range(0))).max_deviation);
}
BENCHMARK(BM_GutkinResidual)->Arg(64)->Arg(256);
BENCHMARK_MAIN();
