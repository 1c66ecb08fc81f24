#include <magbill/errors.hpp>
#include <magbill/integrability.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace magbill {

PolynomialJet::PolynomialJet(BivariatePolynomial f)
    : f_(std::move(f)),
      fx_(f_.dx()),
      fy_(f_.dy()),
      fxx_(fx_.dx()),
      fxy_(fx_.dy()),
      fyy_(fy_.dy()),
      fxxx_(fxx_.dx()),
      fxxy_(fxx_.dy()),
      fxyy_(fxy_.dy()),
      fyyy_(fyy_.dy()) {}

Jet PolynomialJet::at(Vec2 p) const {
  Jet j;
  j.f = f_(p);
  j.fx = fx_(p);
  j.fy = fy_(p);
  j.fxx = fxx_(p);
  j.fxy = fxy_(p);
  j.fyy = fyy_(p);
  j.fxxx = fxxx_(p);
  j.fxxy = fxxy_(p);
  j.fxyy = fxyy_(p);
  j.fyyy = fyyy_(p);
  return j;
}

double H_operator(const Jet& j) {
  return j.fxx * j.fy * j.fy - 2.0 * j.fxy * j.fx * j.fy + j.fyy * j.fx * j.fx;
}

double H_operator(const BivariatePolynomial& F, Vec2 p) { return H_operator(PolynomialJet(F).at(p)); }

namespace {

void require_regular(const BivariatePolynomial& F, const Jet& j, Vec2 p) {
  if (j.grad_norm() <= 1e-12 * F.max_abs_coeff()) {
    throw Error(ErrorCode::SingularPoint,
                "vanishing gradient at (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
  }
}

}  // namespace

double implicit_curvature(const BivariatePolynomial& F, Vec2 p) {
  const Jet j = PolynomialJet(F).at(p);
  require_regular(F, j, p);
  const double n = j.grad_norm();
  return H_operator(j) / (n * n * n);
}

ConstancyResidual residual_equation13(const BivariatePolynomial& F, const std::vector<Vec2>& samples, double beta,
                                      int sign) {
  const PolynomialJet jet(F);
  ConstancyResidual res;
  res.values.reserve(samples.size());
  res.curvature_margin = std::numeric_limits<double>::infinity();
  for (Vec2 p : samples) {
    const Jet j = jet.at(p);
    require_regular(F, j, p);
    const double n = j.grad_norm();
    const double n3 = n * n * n;
    const double h = H_operator(j);
    res.values.push_back(h + sign * beta * n3);
    const double kappa = h / n3;
    res.curvature_margin = std::min({res.curvature_margin, std::abs(kappa - beta), std::abs(kappa + beta)});
  }
  if (res.values.empty()) return res;
  double sum = 0.0;
  for (double v : res.values) sum += v;
  res.mean = sum / double(res.values.size());
  for (double v : res.values) res.max_deviation = std::max(res.max_deviation, std::abs(v - res.mean));
  return res;
}

double Eps3Check::scale() const { return std::max({std::abs(analytic), std::abs(bracket_third), std::abs(bracket_second)}); }

double Eps3Check::relative_error() const {
  const double s = scale();
  return s == 0.0 ? std::abs(analytic - numeric) : std::abs(analytic - numeric) / s;
}

double reflection_difference(const PolynomialJet& jet, Vec2 p, double r, int sign, double eps) {
  const Jet j = jet.at(p);
  const double n = j.grad_norm();
  const double one_minus_cos = 2.0 * std::sin(0.5 * eps) * std::sin(0.5 * eps);
  const double s = std::sin(eps);
  const double k = sign * r / n;
  const Vec2 first{p.x + k * (j.fx * one_minus_cos + j.fy * s), p.y + k * (j.fy * one_minus_cos - j.fx * s)};
  const Vec2 second{p.x + k * (j.fx * one_minus_cos - j.fy * s), p.y + k * (j.fy * one_minus_cos + j.fx * s)};
  return jet.polynomial()(first) - jet.polynomial()(second);
}

Eps3Check eps3_check(const BivariatePolynomial& F, const PlaneCurve& curve, const FieldParams& field, double u,
                     int sign) {
  const PolynomialJet jet(F);
  Eps3Check out;
  out.point = offset_point(curve, u, field.r);
  const Jet j = jet.at(out.point);
  require_regular(F, j, out.point);
  const double n = j.grad_norm();
  const double fx = j.fx, fy = j.fy;

  out.bracket_third = j.fxxx * fy * fy * fy - 3.0 * j.fxxy * fy * fy * fx + 3.0 * j.fxyy * fy * fx * fx -
                      j.fyyy * fx * fx * fx;
  const double b2 = j.fxx * fx * fy + j.fxy * (fy * fy - fx * fx) - j.fyy * fx * fy;
  out.bracket_second = sign * 3.0 * field.beta * n * b2;
  out.analytic = out.bracket_third + out.bracket_second;

  const double r = field.r;
  const double h = 1e-2 * r;
  auto delta = [&](double e) { return reflection_difference(jet, out.point, r, sign, e); };
  const double d1 = delta(h), dm1 = delta(-h), d2 = delta(2 * h), dm2 = delta(-2 * h);
  const double d4 = delta(4 * h), dm4 = delta(-4 * h);
  // Third-derivative stencil at steps h and 2h, then one Richardson step.
  const double t_h = (d2 - 2.0 * d1 + 2.0 * dm1 - dm2) / (2.0 * h * h * h);
  const double t_2h = (d4 - 2.0 * d2 + 2.0 * dm2 - dm4) / (16.0 * h * h * h);
  const double third_derivative = (4.0 * t_h - t_2h) / 3.0;
  // c3 = third_derivative / 6, and c3 = sign r^3 / (3 n^3) * analytic.
  out.numeric = sign * n * n * n * third_derivative / (2.0 * r * r * r);

  const double d0 = delta(0.0);
  const double c2_h = (d1 + dm1 - 2.0 * d0) / (2.0 * h * h);
  const double c2_2h = (d2 + dm2 - 2.0 * d0) / (8.0 * h * h);
  out.even_coefficient_max = std::max({std::abs(d0), std::abs(c2_h), std::abs(c2_2h)});
  return out;
}

BoundaryConstancy boundary_constancy(const BivariatePolynomial& F, const PlaneCurve& curve, const FieldParams& field,
                                     int samples) {
  BoundaryConstancy out;
  for (int side : {-1, +1}) {
    double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < samples; ++i) {
      const double v = F(offset_point(curve, kTwoPi * i / samples, side * field.r));
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mean = sum / samples;
    if (side < 0) {
      out.const_minus = mean;
      out.deviation_minus = hi - lo;
    } else {
      out.const_plus = mean;
      out.deviation_plus = hi - lo;
    }
  }
  return out;
}

BivariatePolynomial normalize_integral(const BivariatePolynomial& F, double c1, double c2) {
  return F * F - (c1 + c2) * F + c1 * c2;
}

BivariatePolynomial ellipse_offset_poly(double a, double b, double r) {
  using P = BivariatePolynomial;
  const P x = P::x(), y = P::y();
  const P x2 = x * x, y2 = y * y;
  const P x4 = x2 * x2, y4 = y2 * y2;
  const P x6 = x4 * x2, y6 = y4 * y2;
  const double a2 = a * a, a4 = a2 * a2, a6 = a4 * a2, a8 = a4 * a4;
  const double b2 = b * b, b4 = b2 * b2, b6 = b4 * b2, b8 = b4 * b4;
  const double r2 = r * r, r4 = r2 * r2, r6 = r4 * r2;

  const P sq_r2_y2 = pow(r2 - y2, 2);
  const P s = x2 + y2 - r2;  // x^2 + y^2 - r^2

  const P g1 = a8 * (b4 + sq_r2_y2 - 2.0 * b2 * (r2 + y2));
  const P g2 = b4 * pow(r2 - x2, 2) * (b4 - 2.0 * b2 * (r2 - x2 + y2) + s * s);
  const P g3 = -2.0 * a6 *
               (b6 + sq_r2_y2 * (r2 + x2 - y2) - b4 * (r2 - 2.0 * x2 + 3.0 * y2) -
                b2 * (r4 + 3.0 * y2 * (x2 - y2) + r2 * (3.0 * x2 + 2.0 * y2)));
  const P g4 = 2.0 * a2 * b2 *
               (-b6 * (r2 + x2) - s * s * (r4 - x2 * y2 - r2 * (x2 + y2)) +
                b4 * (r4 - 3.0 * x4 + 3.0 * x2 * y2 + r2 * (2.0 * x2 + 3.0 * y2)) +
                b2 * (r6 - 2.0 * x6 + x4 * y2 - 3.0 * x2 * y4 + r4 * (-4.0 * x2 + 2.0 * y2) +
                      r2 * (5.0 * x4 - 3.0 * x2 * y2 - 3.0 * y4)));
  const P g5 = a4 * (b8 + 2.0 * b6 * (r2 + 3.0 * x2 - 2.0 * y2) + sq_r2_y2 * s * s -
                     2.0 * b4 * (3.0 * r4 - 3.0 * x4 + 5.0 * x2 * y2 - 3.0 * y4 + 4.0 * r2 * (x2 + y2)) +
                     2.0 * b2 *
                         (r6 - 3.0 * x4 * y2 + x2 * y4 - 2.0 * y6 + 2.0 * r4 * (x2 - 2.0 * y2) +
                          r2 * (-3.0 * x4 - 3.0 * x2 * y2 + 5.0 * y4)));
  return g1 + g2 + g3 + g4 + g5;
}

std::vector<SingularPointCheck> ellipse_offset_singularities(double a, double b, double r) {
  if (std::abs(a - b) <= 1e-14 * std::max(std::abs(a), std::abs(b))) {
    throw Error(ErrorCode::NotApplicable, "a == b: the offsets of a circle are circles");
  }
  using C = std::complex<double>;
  const C ya = std::sqrt(C(b * b - a * a)) * std::sqrt(C(a * a - r * r)) / a;
  const C xb = std::sqrt(C(a * a - b * b)) * std::sqrt(C(b * b - r * r)) / b;
  const std::vector<ComplexPoint> pts{{C(0.0), ya}, {C(0.0), -ya}, {xb, C(0.0)}, {-xb, C(0.0)}};

  const BivariatePolynomial f = ellipse_offset_poly(a, b, r);
  const BivariatePolynomial fx = f.dx(), fy = f.dy();
  std::vector<SingularPointCheck> out;
  for (const auto& p : pts) {
    SingularPointCheck c;
    c.point = p;
    c.is_real = p.x.imag() == 0.0 && p.y.imag() == 0.0;
    c.value_relative = std::abs(f(p.x, p.y)) / f.magnitude_at(p.x, p.y);
    const double gmag = std::hypot(fx.magnitude_at(p.x, p.y), fy.magnitude_at(p.x, p.y));
    c.gradient_relative = std::hypot(std::abs(fx(p.x, p.y)), std::abs(fy(p.x, p.y))) / gmag;
    out.push_back(c);
  }
  return out;
}

const char* to_string(InfinityKind kind) {
  switch (kind) {
    case InfinityKind::Isotropic: return "isotropic";
    case InfinityKind::Singular: return "singular";
    case InfinityKind::Tangent: return "tangent";
    case InfinityKind::Transversal: return "transversal";
  }
  return "unknown";
}

bool InfinityReport::trichotomy_holds() const {
  return std::none_of(points.begin(), points.end(),
                      [](const InfinitePoint& p) { return p.kind == InfinityKind::Transversal; });
}

namespace {

using C = std::complex<double>;

// l[i] is the coefficient of x^i y^(d-i).
C eval_form(const std::vector<double>& l, C x, C y) {
  const int d = int(l.size()) - 1;
  C acc = 0.0;
  for (int i = 0; i <= d; ++i) acc += l[i] * std::pow(x, i) * std::pow(y, d - i);
  return acc;
}

C eval_form_dx(const std::vector<double>& l, C x, C y) {
  const int d = int(l.size()) - 1;
  C acc = 0.0;
  for (int i = 1; i <= d; ++i) acc += double(i) * l[i] * std::pow(x, i - 1) * std::pow(y, d - i);
  return acc;
}

C eval_form_dy(const std::vector<double>& l, C x, C y) {
  const int d = int(l.size()) - 1;
  C acc = 0.0;
  for (int i = 0; i < d; ++i) acc += double(d - i) * l[i] * std::pow(x, i) * std::pow(y, d - i - 1);
  return acc;
}

std::vector<C> univariate_roots(const std::vector<double>& coeffs) {
  int m = int(coeffs.size()) - 1;
  while (m > 0 && coeffs[m] == 0.0) --m;
  if (m <= 0) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(m, m);
  for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < m; ++i) comp(i, m - 1) = -coeffs[i] / coeffs[m];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<C> roots;
  for (int i = 0; i < m; ++i) roots.push_back(es.eigenvalues()(i));
  return roots;
}

}  // namespace

InfinityReport infinity_analysis(const BivariatePolynomial& F) {
  if (F.is_zero()) throw Error(ErrorCode::DegenerateLeadingForm, "zero polynomial");
  const int d = F.degree();
  if (d < 2) throw Error(ErrorCode::NotApplicable, "infinity analysis needs degree >= 2");
  const std::vector<double> lead = F.homogeneous_part(d);
  const std::vector<double> sub = F.homogeneous_part(d - 1);
  if (std::all_of(lead.begin(), lead.end(), [](double c) { return c == 0.0; })) {
    throw Error(ErrorCode::DegenerateLeadingForm, "leading form vanishes");
  }

  struct Cluster {
    C sum;
    int count;
    C mean() const { return sum / double(count); }
  };
  std::vector<Cluster> clusters;
  for (C t : univariate_roots(lead)) {
    bool merged = false;
    for (auto& c : clusters) {
      if (std::abs(c.mean() - t) <= 1e-6 * std::max(1.0, std::abs(t))) {
        c.sum += t;
        ++c.count;
        merged = true;
        break;
      }
    }
    if (!merged) clusters.push_back({t, 1});
  }

  InfinityReport rep;
  rep.degree = d;
  std::vector<std::pair<ComplexPoint, int>> dirs;
  for (const auto& c : clusters) {
    const C t = c.mean();
    const double s = std::sqrt(std::norm(t) + 1.0);
    dirs.push_back({{t / s, C(1.0 / s)}, c.count});
  }
  int finite = 0;
  for (const auto& c : clusters) finite += c.count;
  if (finite < d) dirs.push_back({{C(1.0), C(0.0)}, d - finite});

  double lead_scale = 0.0, sub_scale = 0.0;
  for (double c : lead) lead_scale += std::abs(c);
  for (double c : sub) sub_scale += std::abs(c);
  const double tol_xy = 1e-6 * d * lead_scale;
  const double tol_z = 1e-8 * std::max(lead_scale, sub_scale);

  for (const auto& [dir, mult] : dirs) {
    InfinitePoint p;
    p.direction = dir;
    p.multiplicity = mult;
    const C gx = eval_form_dx(lead, dir.x, dir.y);
    const C gy = eval_form_dy(lead, dir.x, dir.y);
    const C gz = d - 1 >= 0 ? eval_form(sub, dir.x, dir.y) : C(0.0);
    p.grad_xy = std::norm(gx) + std::norm(gy);
    p.grad_z = std::abs(gz);
    if (std::abs(dir.x * dir.x + dir.y * dir.y) < 1e-8) {
      p.kind = InfinityKind::Isotropic;
    } else if (std::sqrt(p.grad_xy) <= tol_xy) {
      p.kind = p.grad_z <= tol_z ? InfinityKind::Singular : InfinityKind::Tangent;
    } else {
      p.kind = InfinityKind::Transversal;
    }
    rep.points.push_back(p);
  }
  return rep;
}

}  // namespace magbill
