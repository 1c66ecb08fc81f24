#pragma once

#include <magbill/curve.hpp>
#include <magbill/polynomial.hpp>

#include <complex>
#include <functional>
#include <vector>

namespace magbill {

/// Uniform angle samples of a scalar function on one circle.
struct CircleSampleSet {
  Vec2 center;
  double radius = 0.0;
  std::vector<double> values;  // values[j] at angle 2 pi j / values.size()

  static CircleSampleSet sample(const std::function<double(Vec2)>& fn, Vec2 center, double radius, int count);
};

struct FourierDegreeResult {
  bool passed = false;
  int degree = 0;
  double tail_max = 0.0;   // max |c_k| over N < |k| <= count/2
  double coeff_max = 0.0;  // max |c_k| overall
  std::vector<double> magnitudes;  // |c_k|, k = 0..count/2
};

/// Trigonometric degree test of the samples against N. Requires a power-of-two
/// sample count of at least 4N + 4 (InvalidConfig otherwise).
FourierDegreeResult circle_fourier_degree_test(const CircleSampleSet& samples, int N, double rel_tol = 1e-9);

struct ChordRecursionResult {
  double alpha = 0.0;  // cos alpha = -a / (2 r)
  std::complex<double> lambda_plus, lambda_minus;
  std::vector<std::complex<double>> g;  // g_N, g_{N+1}, ..., length tail_length + 2
  std::complex<double> c1, c2;          // homogeneous tail g_{m+l} = c1 lambda^l + c2 conj(lambda)^l
  double tail_amplitude = 0.0;          // |c1| + |c2|
  bool decaying = false;
};

/// Forward solve of r g_{k+1} + a g_k + r g_{k-1} = f_k / a from the seeds
/// (g_N, g_{N+1}). `f[k]` is f_k for k >= 0; f_k = 0 beyond the list.
/// a == 0 throws ConcentricDegenerate and |a| >= 2r throws RootsOffUnitCircle.
ChordRecursionResult fourier_chord_recursion(const std::vector<std::complex<double>>& f, double a, double r, int N,
                                             std::complex<double> gN, std::complex<double> gN1,
                                             int tail_length = 64);

struct PolyFitResult {
  BivariatePolynomial polynomial;
  double max_residual = 0.0;           // max |p(x_i) - v_i|
  double relative_residual = 0.0;      // max_residual / max |v_i|
};

/// Least-squares fit in the monomial basis of total degree <= `degree`,
/// solved by column-pivoted QR in centred and scaled coordinates. Needs at
/// least 3 (D+1)(D+2)/2 samples; a rank-deficient design throws IllConditionedFit.
PolyFitResult global_poly_fit(const std::vector<Vec2>& points, const std::vector<double>& values, int degree);

struct CirclePipelineReport {
  int N = 0;
  std::vector<FourierDegreeResult> circles;
  bool all_circles_pass = false;
  PolyFitResult fit;  // degree 2N over all circle samples
};

/// Samples `fn` on `circle_count` circles of radius field.r centred at equally
/// spaced points of the table, tests each against degree N, then fits the
/// union of the samples globally at degree 2N.
CirclePipelineReport circle_pipeline(const std::function<double(Vec2)>& fn, const PlaneCurve& curve,
                                     const FieldParams& field, int N, int circle_count = 32,
                                     int samples_per_circle = 64);

}  // namespace magbill
