#include <magbill/circles.hpp>
#include <magbill/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace magbill {

CircleSampleSet CircleSampleSet::sample(const std::function<double(Vec2)>& fn, Vec2 center, double radius,
                                        int count) {
  CircleSampleSet s;
  s.center = center;
  s.radius = radius;
  s.values.reserve(std::size_t(std::max(count, 0)));
  for (int j = 0; j < count; ++j) s.values.push_back(fn(center + radius * unit(kTwoPi * j / count)));
  return s;
}

FourierDegreeResult circle_fourier_degree_test(const CircleSampleSet& samples, int N, double rel_tol) {
  const int m = int(samples.values.size());
  if (N < 0) throw Error(ErrorCode::InvalidConfig, "negative target degree");
  if (m < 4 * N + 4 || (m & (m - 1)) != 0) {
    throw Error(ErrorCode::InvalidConfig, "need a power-of-two sample count >= " + std::to_string(4 * N + 4) +
                                              ", got " + std::to_string(m));
  }
  FourierDegreeResult out;
  out.degree = N;
  out.magnitudes.resize(std::size_t(m / 2 + 1));
  for (int k = 0; k <= m / 2; ++k) {
    std::complex<double> c = 0.0;
    for (int j = 0; j < m; ++j) {
      // Reduce k j mod m first so the twiddle angle stays small.
      const double angle = -kTwoPi * double((std::int64_t(k) * j) % m) / m;
      c += samples.values[j] * std::polar(1.0, angle);
    }
    out.magnitudes[k] = std::abs(c) / m;
  }
  for (int k = 0; k <= m / 2; ++k) {
    out.coeff_max = std::max(out.coeff_max, out.magnitudes[k]);
    if (k > N) out.tail_max = std::max(out.tail_max, out.magnitudes[k]);
  }
  out.passed = out.tail_max < rel_tol * out.coeff_max;
  return out;
}

ChordRecursionResult fourier_chord_recursion(const std::vector<std::complex<double>>& f, double a, double r, int N,
                                             std::complex<double> gN, std::complex<double> gN1, int tail_length) {
  if (a == 0.0) throw Error(ErrorCode::ConcentricDegenerate, "center offset a = 0");
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidConfig, "radius must be positive");
  if (std::abs(a) >= 2.0 * r) {
    throw Error(ErrorCode::RootsOffUnitCircle, "|a| >= 2r: characteristic roots leave the unit circle");
  }
  if (N < 0 || tail_length < 0) throw Error(ErrorCode::InvalidConfig, "negative index");

  ChordRecursionResult out;
  out.alpha = std::acos(-a / (2.0 * r));
  out.lambda_plus = std::polar(1.0, out.alpha);
  out.lambda_minus = std::conj(out.lambda_plus);

  const int K = int(f.size()) - 1;
  auto forcing = [&](int k) { return k >= 0 && k <= K ? f[k] : std::complex<double>(0.0); };
  const int m = std::max(N, K);
  const int last = std::max(N + tail_length + 1, m + 1);
  out.g.reserve(std::size_t(last - N + 1));
  out.g.push_back(gN);
  out.g.push_back(gN1);
  for (int k = N + 1; k < last; ++k) {
    const auto gk = out.g[k - N], gkm1 = out.g[k - 1 - N];
    out.g.push_back((forcing(k) / a - a * gk - r * gkm1) / r);
  }

  const auto gm = out.g[m - N], gm1 = out.g[m + 1 - N];
  out.c1 = (gm1 - gm * out.lambda_minus) / (out.lambda_plus - out.lambda_minus);
  out.c2 = gm - out.c1;
  out.tail_amplitude = std::abs(out.c1) + std::abs(out.c2);
  out.decaying = out.tail_amplitude < 1e-10;
  return out;
}

PolyFitResult global_poly_fit(const std::vector<Vec2>& points, const std::vector<double>& values, int degree) {
  if (degree < 0) throw Error(ErrorCode::InvalidConfig, "negative degree bound");
  if (points.size() != values.size()) throw Error(ErrorCode::InvalidConfig, "points and values differ in length");
  const int ncols = (degree + 1) * (degree + 2) / 2;
  if (points.size() < std::size_t(3 * ncols)) {
    throw Error(ErrorCode::InvalidConfig, "need at least " + std::to_string(3 * ncols) + " samples for degree " +
                                              std::to_string(degree));
  }

  Vec2 centroid{};
  for (Vec2 p : points) centroid += p;
  centroid = centroid / double(points.size());
  double scale = 0.0;
  for (Vec2 p : points) scale = std::max(scale, norm(p - centroid));
  if (scale == 0.0) throw Error(ErrorCode::IllConditionedFit, "all samples coincide");

  const Eigen::Index rows = Eigen::Index(points.size());
  Eigen::MatrixXd A(rows, ncols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index row = 0; row < rows; ++row) {
    const Vec2 q = (points[row] - centroid) / scale;
    int col = 0;
    for (int d = 0; d <= degree; ++d)
      for (int i = d; i >= 0; --i) A(row, col++) = std::pow(q.x, i) * std::pow(q.y, d - i);
    b(row) = values[row];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  if (qr.rank() < ncols) {
    throw Error(ErrorCode::IllConditionedFit,
                "design matrix rank " + std::to_string(qr.rank()) + " < " + std::to_string(ncols));
  }
  const Eigen::VectorXd coef = qr.solve(b);

  BivariatePolynomial local;
  int col = 0;
  for (int d = 0; d <= degree; ++d)
    for (int i = d; i >= 0; --i) local.add_to_coeff(i, d - i, coef(col++));

  PolyFitResult out;
  out.polynomial = affine_substitute(local, 1.0 / scale, -centroid.x / scale, 1.0 / scale, -centroid.y / scale);
  double vmax = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    out.max_residual = std::max(out.max_residual, std::abs(out.polynomial(points[k]) - values[k]));
    vmax = std::max(vmax, std::abs(values[k]));
  }
  out.relative_residual = vmax > 0.0 ? out.max_residual / vmax : out.max_residual;
  return out;
}

CirclePipelineReport circle_pipeline(const std::function<double(Vec2)>& fn, const PlaneCurve& curve,
                                     const FieldParams& field, int N, int circle_count, int samples_per_circle) {
  CirclePipelineReport rep;
  rep.N = N;
  rep.all_circles_pass = true;
  std::vector<Vec2> pts;
  std::vector<double> vals;
  for (int i = 0; i < circle_count; ++i) {
    const Vec2 c = curve.position(kTwoPi * i / circle_count);
    const CircleSampleSet s = CircleSampleSet::sample(fn, c, field.r, samples_per_circle);
    rep.circles.push_back(circle_fourier_degree_test(s, N));
    rep.all_circles_pass = rep.all_circles_pass && rep.circles.back().passed;
    for (int j = 0; j < samples_per_circle; ++j) {
      pts.push_back(c + field.r * unit(kTwoPi * j / samples_per_circle));
      vals.push_back(s.values[j]);
    }
  }
  rep.fit = global_poly_fit(pts, vals, 2 * N);
  return rep;
}

}  // namespace magbill
