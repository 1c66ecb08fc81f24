#include <magbill/errors.hpp>
#include <magbill/gutkin.hpp>

#include "numeric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace magbill {

GutkinParams GutkinParams::make(double delta, double beta) {
  if (!(delta > 0.0 && delta < kPi)) throw Error(ErrorCode::InvalidConfig, "delta must lie in (0, pi)");
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidConfig, "beta must be positive");
  return {delta, beta, 1.0 / beta};
}

ChordRecord delta_chord(const PlaneCurve& curve, const FieldParams& field, double delta, double u_entry) {
  const ArcStep step = flow_step(curve, field, BoundaryState{u_entry, delta});
  const FrameSample q = eval_frame(curve, step.exit.u);

  ChordRecord c;
  c.u_entry = step.entry.u;
  c.u_exit = step.exit.u;
  c.phi_entry = curve.tangent_angle(c.u_entry);
  c.phi_exit = curve.tangent_angle(c.u_exit);
  c.d = 0.5 * wrap_two_pi(c.phi_entry - c.phi_exit);
  c.phi_bar = wrap_two_pi(c.phi_exit + c.d);
  c.entry_point = step.entry_point;
  c.exit_point = step.exit_point;
  c.entry_angle = delta;
  c.exit_angle = step.exit_angle;
  c.p_minus = step.center;
  c.p_plus = q.point + field.r * J(rotate(q.tangent, step.exit_angle));
  c.midpoint = 0.5 * (c.p_minus + c.p_plus);
  c.tangency = q.point + field.r * q.normal;
  return c;
}

GutkinResidual gutkin_residual(const PlaneCurve& curve, const FieldParams& field, double delta, int grid) {
  if (grid < 1) throw Error(ErrorCode::InvalidConfig, "grid must be positive");
  GutkinResidual out;
  out.chords.reserve(std::size_t(grid));
  out.gamma.reserve(std::size_t(grid));
  for (int i = 0; i < grid; ++i) {
    ChordRecord c = delta_chord(curve, field, delta, kTwoPi * i / grid);
    out.max_deviation = std::max(out.max_deviation, std::abs(c.exit_angle - delta));
    out.gamma.push_back(c.p_minus);
    out.chords.push_back(std::move(c));
  }
  return out;
}

namespace {

double eq6_value(const FieldParams& field, double delta, const ChordRecord& c) {
  const std::complex<double> lhs = to_complex(c.entry_point - c.exit_point);
  const std::complex<double> rhs = (2.0 / field.beta) * std::sin(delta + c.d) * std::polar(1.0, c.phi_bar);
  return std::abs(lhs - rhs);
}

}  // namespace

Eq6Report eq6_residual(const PlaneCurve& curve, const FieldParams& field, double delta, int grid) {
  if (grid < 1) throw Error(ErrorCode::InvalidConfig, "grid must be positive");
  Eq6Report rep;
  double d_guess = solve_d0(delta, field.beta);
  for (int j = 0; j < grid; ++j) {
    const double target = kTwoPi * j / grid;
    auto chord_at = [&](double phi_entry) {
      return delta_chord(curve, field, delta, curve.parameter_at_tangent_angle(wrap_two_pi(phi_entry)));
    };
    auto g = [&](double phi_entry) { return wrap_pi(chord_at(phi_entry).phi_bar - target); };

    const double start = target + d_guess;
    const double g0 = g(start);
    double lo = start, hi = start, glo = g0, ghi = g0;
    bool found = g0 == 0.0;
    // Grow a bracket outward in both directions, skipping jumps of the wrapped angle.
    for (int k = 1; k <= 100 && !found; ++k) {
      for (int side : {+1, -1}) {
        const double a = start + side * 0.02 * (k - 1);
        const double b = start + side * 0.02 * k;
        const double ga = side > 0 ? ghi : glo;
        const double gb = g(b);
        if (std::abs(gb - ga) < kPi && (ga <= 0.0) != (gb <= 0.0)) {
          lo = std::min(a, b);
          hi = std::max(a, b);
          glo = side > 0 ? ga : gb;
          ghi = side > 0 ? gb : ga;
          found = true;
          break;
        }
        if (side > 0) ghi = gb; else glo = gb;
      }
    }
    if (!found) {
      throw Error(ErrorCode::ChordSolveFailure, "no chord with mean tangent angle " + std::to_string(target));
    }
    const double phi_entry = lo == hi ? lo : detail::bracketed_root(g, lo, hi, glo, ghi);
    const ChordRecord c = chord_at(phi_entry);
    d_guess = c.d;
    Eq6Row row{target, c.d, eq6_value(field, delta, c)};
    rep.max_residual = std::max(rep.max_residual, row.residual);
    rep.rows.push_back(row);
  }
  return rep;
}

double solve_d0(double delta, double beta) {
  if (!(beta > 0.0) || !(delta > 0.0 && delta < kPi)) {
    throw Error(ErrorCode::NoSolution, "need beta > 0 and delta in (0, pi)");
  }
  auto f = [&](double d) { return beta * std::sin(d) - std::sin(delta + d); };
  const double lo = 0.0, hi = kPi - delta;
  if ((f(lo) < 0.0) == (f(hi) < 0.0)) throw Error(ErrorCode::NoSolution, "no sign change on (0, pi - delta)");
  return detail::bisect(f, lo, hi, 1e-15);
}

std::vector<double> gutkin_mode_roots(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidConfig, "mode must be >= 2");
  // n tan d - tan(n d) with both cosines cleared.
  auto h = [n](double d) { return n * std::sin(d) * std::cos(n * d) - std::sin(n * d) * std::cos(d); };
  // Near 0 and pi, h vanishes to third order and only rounding noise changes sign.
  const double lo = 1e-4, hi = kPi - 1e-4;
  const int cells = 4000 * n;
  std::vector<double> roots;
  double a = lo, fa = h(a);
  for (int i = 1; i <= cells; ++i) {
    const double b = lo + (hi - lo) * i / cells;
    const double fb = h(b);
    if ((fa < 0.0) != (fb < 0.0)) {
      const double d = detail::bisect(h, a, b, 1e-15);
      if (std::abs(std::cos(d)) > 1e-9) roots.push_back(d);
    }
    a = b;
    fa = fb;
  }
  return roots;
}

FirstOrderModes first_order_d1(int n, double d0, double delta, double beta, double rho1_cos, double rho1_sin) {
  if (n < 1) throw Error(ErrorCode::InvalidConfig, "mode must be positive");
  FirstOrderModes m;
  m.K = std::cos(delta + d0) / beta - std::cos(d0);
  if (std::abs(m.K) < 1e-14) throw Error(ErrorCode::DegenerateLinearization, "K = cos(delta+d0)/beta - cos d0 = 0");
  m.amplitude_real = std::cos(d0) * std::sin(n * d0) / (n * m.K);
  m.amplitude_imag = std::sin(d0) * std::cos(n * d0) / m.K;
  if (rho1_cos == 0.0 && rho1_sin == 0.0) return m;

  const double scale = std::max({std::abs(m.amplitude_real), std::abs(m.amplitude_imag), 1e-300});
  if (std::abs(m.amplitude_real - m.amplitude_imag) > 1e-8 * scale) {
    throw Error(ErrorCode::InconsistentModes, "mode " + std::to_string(n) + " does not satisfy n tan d0 = tan(n d0)");
  }
  m.amplitude = 0.5 * (m.amplitude_real + m.amplitude_imag);
  m.d1_cos = m.amplitude * rho1_cos;
  m.d1_sin = m.amplitude * rho1_sin;
  return m;
}

GutkinConstruction perturbed_gutkin_curve(int n, double delta, double epsilon) {
  if (!(delta > 0.0 && delta < kPi)) throw Error(ErrorCode::InvalidConfig, "delta must lie in (0, pi)");
  double best_beta = 0.0, best_d0 = 0.0;
  for (double d0 : gutkin_mode_roots(n)) {
    const double beta = std::sin(delta + d0) / std::sin(d0);
    if (beta > best_beta) {
      best_beta = beta;
      best_d0 = d0;
    }
  }
  if (!(best_beta > 0.0)) {
    throw Error(ErrorCode::NoSolution, "mode " + std::to_string(n) + " has no root with positive beta");
  }
  std::vector<double> cos_coeffs(std::size_t(n), 0.0);
  cos_coeffs[std::size_t(n - 1)] = epsilon;
  PlaneCurve curve = curve_from_rho(1.0, std::move(cos_coeffs), {});
  const FieldParams field = FieldParams::from_beta(best_beta);
  const FirstOrderModes modes = first_order_d1(n, best_d0, delta, best_beta, 1.0, 0.0);
  const StrongFieldReport adm = check_strong_field(curve, field);
  return GutkinConstruction{std::move(curve), field, PerturbationSeed{n, best_d0, delta, best_beta, epsilon},
                            modes.amplitude, adm};
}

double distance_to_closed_polyline(Vec2 p, const std::vector<Vec2>& points) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = points[i], b = points[(i + 1) % n];
    const Vec2 ab = b - a;
    const double len2 = norm2(ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, distance(p, a + t * ab));
  }
  return best;
}

ZindlerReport zindler_report(const PlaneCurve& curve, const FieldParams& field, double delta, int grid) {
  if (grid < 512) throw Error(ErrorCode::InvalidConfig, "zindler grid must be >= 512");
  const double r = field.r;
  const double chord_expected = 2.0 * r * std::sin(delta);
  const double side_expected = 2.0 * r * std::sin(0.5 * delta);
  const double mid_expected = r * std::cos(delta);

  ZindlerReport rep;
  rep.rows.reserve(std::size_t(grid));
  for (int i = 0; i < grid; ++i) {
    ZindlerRow row;
    row.chord = delta_chord(curve, field, delta, kTwoPi * i / grid);
    const ChordRecord& c = row.chord;
    const double s1 = distance(c.p_minus, c.tangency), s2 = distance(c.tangency, c.p_plus);
    const double side_measured = 2.0 * r * std::sin(0.5 * c.exit_angle);
    row.chord_length_error = std::abs(c.chord_length() - chord_expected);
    row.tangency_error = std::max(std::abs(s1 - side_expected), std::abs(s2 - side_expected));
    row.isosceles_error = std::max(std::abs(s1 - side_measured), std::abs(s2 - side_measured));
    row.midpoint_distance = nearest_point(curve, c.midpoint).signed_distance;
    row.midpoint_distance_error = std::abs(row.midpoint_distance - mid_expected);
    rep.rows.push_back(row);
  }

  for (int i = 0; i < grid; ++i) {
    auto mid = [&](int k) { return rep.rows[std::size_t(((i + k) % grid + grid) % grid)].chord.midpoint; };
    const Vec2 vel = (-1.0 * mid(2) + 8.0 * mid(1) - 8.0 * mid(-1) + mid(-2)) / 12.0;
    const ChordRecord& c = rep.rows[std::size_t(i)].chord;
    const Vec2 dir = c.p_plus - c.p_minus;
    const double denom = norm(vel) * norm(dir);
    const double s = denom > 0.0 ? std::abs(cross(vel, dir)) / denom : 0.0;
    rep.rows[std::size_t(i)].velocity_angle = std::asin(std::min(1.0, s));
  }

  for (const auto& row : rep.rows) {
    rep.max_chord_length_error = std::max(rep.max_chord_length_error, row.chord_length_error);
    rep.max_tangency_error = std::max(rep.max_tangency_error, row.tangency_error);
    rep.max_isosceles_error = std::max(rep.max_isosceles_error, row.isosceles_error);
    rep.max_midpoint_distance_error = std::max(rep.max_midpoint_distance_error, row.midpoint_distance_error);
    rep.max_abs_midpoint_distance = std::max(rep.max_abs_midpoint_distance, std::abs(row.midpoint_distance));
    rep.max_velocity_angle = std::max(rep.max_velocity_angle, row.velocity_angle);
  }
  return rep;
}

namespace {

std::size_t nearest_segment(Vec2 p, const std::vector<Vec2>& points) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  const std::size_t n = points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = points[i], ab = points[(i + 1) % n] - a;
    const double len2 = norm2(ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    const double d = distance(p, a + t * ab);
    if (d < best) {
      best = d;
      at = i;
    }
  }
  return at;
}

// Distance from q to the curve u -> p_minus(u) near the polyline segment
// starting at chord i: root of <P(u) - q, P'(u)> on the two neighbouring cells.
double distance_to_gamma(const PlaneCurve& curve, const FieldParams& field, double delta, const GutkinResidual& res,
                         Vec2 q) {
  const std::size_t i = nearest_segment(q, res.gamma);
  const double polyline = distance_to_closed_polyline(q, res.gamma);
  const double h = kTwoPi / double(res.gamma.size());
  const double u0 = res.chords[i].u_entry;
  auto P = [&](double u) { return delta_chord(curve, field, delta, wrap_two_pi(u)).p_minus; };
  auto g = [&](double u) {
    const double e = 1e-6;
    return dot(P(u) - q, P(u + e) - P(u - e));
  };
  const double lo = u0 - h, hi = u0 + 2 * h;
  try {
    const double glo = g(lo), ghi = g(hi);
    if ((glo < 0.0) == (ghi < 0.0)) return polyline;
    const double u = detail::bracketed_root(g, lo, hi, glo, ghi);
    return std::min(polyline, distance(P(u), q));
  } catch (const Error&) {
    return polyline;
  }
}

}  // namespace

GammaInvariance gamma_invariance_check(const PlaneCurve& curve, const FieldParams& field, double delta, int grid) {
  const GutkinResidual res = gutkin_residual(curve, field, delta, grid);
  GammaInvariance out;
  for (const auto& c : res.chords) {
    const Vec2 image = center_map_M(curve, field, c.p_minus);
    out.max_distance_to_gamma = std::max(out.max_distance_to_gamma, distance_to_gamma(curve, field, delta, res, image));
    out.max_distance_to_p_plus = std::max(out.max_distance_to_p_plus, distance(image, c.p_plus));
  }
  return out;
}

namespace {

// Unknown layout: rho harmonics k n for k = 2..H (cos, sin), then d_cos[0],
// then d harmonics k n for k = 1..H (cos, sin).
struct RefineLayout {
  int n, H;
  int size() const { return 2 * (H - 1) + 1 + 2 * H; }
};

FourierRhoShape shape_of(const RefineLayout& L, double epsilon, const Eigen::VectorXd& x) {
  FourierRhoShape s;
  s.c0 = 1.0;
  s.cos_coeffs.assign(std::size_t(L.n * L.H), 0.0);
  s.sin_coeffs.assign(std::size_t(L.n * L.H), 0.0);
  s.cos_coeffs[std::size_t(L.n - 1)] = epsilon;
  for (int k = 2; k <= L.H; ++k) {
    s.cos_coeffs[std::size_t(k * L.n - 1)] = x(2 * (k - 2));
    s.sin_coeffs[std::size_t(k * L.n - 1)] = x(2 * (k - 2) + 1);
  }
  return s;
}

double d_of(const RefineLayout& L, const Eigen::VectorXd& x, double phi) {
  const int base = 2 * (L.H - 1);
  double d = x(base);
  for (int k = 1; k <= L.H; ++k) {
    d += x(base + 2 * k - 1) * std::cos(k * L.n * phi) + x(base + 2 * k) * std::sin(k * L.n * phi);
  }
  return d;
}

Eigen::VectorXd chord_identity_residual(const RefineLayout& L, double epsilon, double beta, double delta, int grid,
                                        const Eigen::VectorXd& x) {
  const FourierRhoShape s = shape_of(L, epsilon, x);
  Eigen::VectorXd res(2 * grid);
  for (int j = 0; j < grid; ++j) {
    const double phi = kTwoPi * j / grid;
    const double d = d_of(L, x, phi);
    const std::complex<double> lhs = to_complex(s.position(phi + d) - s.position(phi - d));
    const std::complex<double> rhs = (2.0 / beta) * std::sin(delta + d) * std::polar(1.0, phi);
    res(2 * j) = (lhs - rhs).real();
    res(2 * j + 1) = (lhs - rhs).imag();
  }
  return res;
}

}  // namespace

RefinementResult refine_gutkin_curve(const GutkinConstruction& seed, const RefinementOptions& options) {
  if (options.harmonics < 1 || options.grid < 8 || options.max_iterations < 0 ||
      !(options.damping > 0.0 && options.damping <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "invalid refinement options");
  }
  const RefineLayout L{seed.seed.n, options.harmonics};
  const double eps = seed.seed.epsilon, beta = seed.seed.beta, delta = seed.seed.delta;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(L.size());
  x(2 * (L.H - 1)) = seed.seed.d0;
  x(2 * (L.H - 1) + 1) = eps * seed.d1_amplitude;

  RefinementResult out;
  Eigen::VectorXd res = chord_identity_residual(L, eps, beta, delta, options.grid, x);
  out.initial_residual = res.lpNorm<Eigen::Infinity>();
  out.final_residual = out.initial_residual;

  for (int it = 0; it < options.max_iterations && out.final_residual > options.tolerance; ++it) {
    Eigen::MatrixXd jac(res.size(), x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double h = 1e-7 * std::max(1.0, std::abs(x(k)));
      Eigen::VectorXd xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      jac.col(k) = (chord_identity_residual(L, eps, beta, delta, options.grid, xp) -
                    chord_identity_residual(L, eps, beta, delta, options.grid, xm)) /
                   (2.0 * h);
    }
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-res);
    x += options.damping * step;
    res = chord_identity_residual(L, eps, beta, delta, options.grid, x);
    out.iterations = it + 1;
    out.final_residual = res.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(out.final_residual)) break;
  }

  out.converged = std::isfinite(out.final_residual) && out.final_residual <= options.tolerance;
  out.shape = shape_of(L, eps, x);
  const int base = 2 * (L.H - 1);
  out.d_cos.assign(std::size_t(L.H + 1), 0.0);
  out.d_sin.assign(std::size_t(L.H + 1), 0.0);
  out.d_cos[0] = x(base);
  for (int k = 1; k <= L.H; ++k) {
    out.d_cos[std::size_t(k)] = x(base + 2 * k - 1);
    out.d_sin[std::size_t(k)] = x(base + 2 * k);
  }
  out.message = out.converged ? "converged" : "did not reach tolerance " + std::to_string(options.tolerance) +
                                                  " in " + std::to_string(out.iterations) + " iterations";
  return out;
}

}  // namespace magbill
