#include <magbill/circles.hpp>
#include <magbill/gutkin.hpp>
#include <magbill/integrability.hpp>
#include <magbill/io.hpp>
#include <magbill/larmor.hpp>
#include <magbill_cli/cli.hpp>
#include <magbill_cli/output.hpp>
#include <magbill_cli/svg.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace magbill::cli {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::NotClosed:
    case ErrorCode::NonConvexRepresentation:
    case ErrorCode::NoSolution:
    case ErrorCode::NotApplicable:
    case ErrorCode::DegenerateLeadingForm:
      return kExitValidation;
    default:
      return kExitNumeric;
  }
}

namespace {

struct Options {
  std::string subcommand;
  std::string config_path;
  std::string out_dir = ".";
  std::string format;
  std::optional<long long> steps;
  std::optional<int> grid;
  std::optional<double> delta;
  std::optional<unsigned long long> seed;
  std::optional<double> tol;
  std::string mode = "boundary";
  std::optional<int> n;
  std::optional<double> epsilon;
  bool refine = false;
  bool allow_weak_field = false;
};

struct Context {
  Options opt;
  json config;        // raw file contents
  json effective;     // config plus resolved options, hashed into the sidecar
  std::ostream& out;
  std::ostream& err;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorCode::InvalidConfig, what) {}
};

json load_config(const std::string& path) {
  if (path.empty()) throw ValidationError("--config FILE is required");
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read config '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
}

std::string resolve_format(const Options& opt, const std::string& fallback, std::initializer_list<const char*> allowed) {
  const std::string f = opt.format.empty() ? fallback : opt.format;
  for (const char* a : allowed)
    if (f == a) return f;
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ValidationError(opt.subcommand + " supports --format " + list + ", got '" + f + "'");
}

double config_number(const json& cfg, const char* key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg.at(key).is_number()) throw ValidationError(std::string("'") + key + "' must be a number");
  return cfg.at(key).get<double>();
}

FieldParams require_field(const CurveConfig& cc) {
  if (!cc.beta) throw ValidationError("config needs a positive 'beta'");
  return FieldParams::from_beta(*cc.beta);
}

void require_strong_field(const PlaneCurve& curve, const FieldParams& field) {
  const StrongFieldReport rep = check_strong_field(curve, field);
  if (rep.pass()) return;
  std::ostringstream os;
  os << "strong-field curvature assumption r*max|k| < 1/2 violated: r*max|k| = " << rep.r_times_max_curvature
     << " (beta must exceed 2*max|k| = " << 2.0 * curve.max_abs_curvature() << ")";
  if (rep.curvature_ok && !rep.offsets_simple) os << "; sampled offsets up to distance 2r self-intersect";
  throw ValidationError(os.str());
}

json tolerances_json(const Context& ctx) {
  json t = {{"crossing_refine", "toms748 to full double precision"},
            {"crossing_grid", kCrossingGrid},
            {"grazing_sine", 1e-8}};
  if (ctx.opt.tol) t["user_tol"] = *ctx.opt.tol;
  return t;
}

json meta_for(const Context& ctx) {
  return {{"config_hash", sha256_hex(ctx.effective.dump())},
          {"subcommand", ctx.opt.subcommand},
          {"tolerances", tolerances_json(ctx)},
          {"version", version()}};
}

fs::path emit(const Context& ctx, const std::string& stem, const std::string& ext, const std::string& content) {
  const fs::path file = fs::path(ctx.opt.out_dir) / (stem + "." + ext);
  write_artifact(file, content, meta_for(ctx));
  ctx.out << "wrote " << file.string() << "\n";
  return file;
}

std::vector<Vec2> sample_curve(const PlaneCurve& curve, int n, double t = 0.0) {
  std::vector<Vec2> pts;
  pts.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) pts.push_back(offset_point(curve, kTwoPi * i / n, t));
  return pts;
}

json vec_json(Vec2 p) { return json::array({p.x, p.y}); }

// ---------------------------------------------------------------- simulate

int cmd_simulate(Context& ctx) {
  const CurveConfig cc = curve_config_from_json(ctx.config);
  const FieldParams field = require_field(cc);
  const std::string format = resolve_format(ctx.opt, "csv", {"csv", "json", "svg"});
  if (ctx.opt.mode != "boundary" && ctx.opt.mode != "center") throw ValidationError("--mode must be boundary or center");
  const long long steps = ctx.opt.steps.value_or(1000);
  if (steps < 0) throw ValidationError("--steps must be >= 0");
  require_strong_field(cc.curve, field);

  BoundaryState start{0.0, kPi / 3};
  if (ctx.config.contains("initial")) {
    const json& init = ctx.config.at("initial");
    start.u = config_number(init, "u", start.u);
    start.theta = config_number(init, "theta", start.theta);
  }
  if (!(start.theta > 0.0 && start.theta < kPi)) throw ValidationError("initial theta must lie in (0, pi)");
  ctx.effective["resolved"] = {{"steps", steps}, {"mode", ctx.opt.mode}, {"u", start.u}, {"theta", start.theta}};

  std::string content;
  std::vector<Vec2> points;
  if (ctx.opt.mode == "boundary") {
    const auto states = trajectory(cc.curve, field, start, std::size_t(steps));
    if (format == "csv") {
      content = "step,u,theta,x,y\n";
      for (std::size_t i = 0; i < states.size(); ++i) {
        const Vec2 p = cc.curve.position(states[i].u);
        content += csv_row({double(i), states[i].u, states[i].theta, p.x, p.y});
      }
    } else if (format == "json") {
      json rows = json::array();
      for (std::size_t i = 0; i < states.size(); ++i) {
        const Vec2 p = cc.curve.position(states[i].u);
        rows.push_back({{"step", i}, {"u", states[i].u}, {"theta", states[i].theta}, {"x", p.x}, {"y", p.y}});
      }
      content = json{{"mode", "boundary"}, {"states", rows}}.dump(2) + "\n";
    }
    for (const auto& s : states) points.push_back(cc.curve.position(s.u));
  } else {
    const FrameSample f = eval_frame(cc.curve, start.u);
    const Vec2 c0 = larmor_center(f.point, rotate(f.tangent, start.theta), field.r);
    const auto centers = center_trajectory(cc.curve, field, c0, std::size_t(steps));
    if (format == "csv") {
      content = "step,cx,cy\n";
      for (std::size_t i = 0; i < centers.size(); ++i) content += csv_row({double(i), centers[i].x, centers[i].y});
    } else if (format == "json") {
      json rows = json::array();
      for (std::size_t i = 0; i < centers.size(); ++i) rows.push_back({{"step", i}, {"cx", centers[i].x}, {"cy", centers[i].y}});
      content = json{{"mode", "center"}, {"centers", rows}}.dump(2) + "\n";
    }
    points = centers;
  }
  if (format == "svg") {
    SvgScene scene;
    scene.paths.push_back({sample_curve(cc.curve, kDefaultGrid), true});
    scene.markers.push_back({points, palette_colour(0)});
    content = export_svg(scene);
  }
  emit(ctx, "simulate", format, content);
  return kExitOk;
}

// ---------------------------------------------------------------- portrait

int cmd_portrait(Context& ctx) {
  const CurveConfig cc = curve_config_from_json(ctx.config);
  const FieldParams field = require_field(cc);
  const std::string format = resolve_format(ctx.opt, "csv", {"csv", "json", "svg"});
  const long long steps = ctx.opt.steps.value_or(200);
  const int grid = ctx.opt.grid.value_or(4);
  if (steps < 0 || grid < 1) throw ValidationError("--steps must be >= 0 and --grid >= 1");
  require_strong_field(cc.curve, field);
  ctx.effective["resolved"] = {{"steps", steps}, {"grid", grid}};

  std::mt19937_64 rng(ctx.opt.seed.value_or(0));
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  std::vector<std::vector<Vec2>> orbits;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      double cu = i, cth = j + 0.5;
      if (ctx.opt.seed) {
        cu += jitter(rng);
        cth += jitter(rng);
      }
      const double u = kTwoPi * cu / grid;
      const double theta = kPi * cth / grid;
      const FrameSample f = eval_frame(cc.curve, wrap_two_pi(u));
      const Vec2 c0 = larmor_center(f.point, rotate(f.tangent, theta), field.r);
      orbits.push_back(center_trajectory(cc.curve, field, c0, std::size_t(steps)));
    }
  }

  double max_spread = 0.0;
  for (const auto& orbit : orbits) {
    double lo = norm(orbit.front()), hi = lo;
    for (Vec2 p : orbit) {
      lo = std::min(lo, norm(p));
      hi = std::max(hi, norm(p));
    }
    max_spread = std::max(max_spread, hi - lo);
  }

  std::string content;
  if (format == "csv") {
    content = "orbit,step,cx,cy\n";
    for (std::size_t k = 0; k < orbits.size(); ++k)
      for (std::size_t s = 0; s < orbits[k].size(); ++s)
        content += csv_row({double(k), double(s), orbits[k][s].x, orbits[k][s].y});
  } else if (format == "json") {
    json arr = json::array();
    for (const auto& orbit : orbits) {
      json pts = json::array();
      for (Vec2 p : orbit) pts.push_back(vec_json(p));
      arr.push_back(pts);
    }
    content = json{{"orbits", arr}, {"max_radial_spread", max_spread}}.dump(2) + "\n";
  } else {
    SvgScene scene;
    scene.paths.push_back({sample_curve(cc.curve, kDefaultGrid), true});
    scene.paths.push_back({sample_curve(cc.curve, kDefaultGrid, field.r), true, "#999999"});
    scene.paths.push_back({sample_curve(cc.curve, kDefaultGrid, -field.r), true, "#999999"});
    for (std::size_t k = 0; k < orbits.size(); ++k) scene.markers.push_back({orbits[k], palette_colour(k)});
    content = export_svg(scene);
  }
  emit(ctx, "portrait", format, content);
  ctx.out << json{{"orbits", orbits.size()}, {"max_radial_spread", max_spread}}.dump() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- offset

int cmd_offset(Context& ctx) {
  const CurveConfig cc = curve_config_from_json(ctx.config);
  const FieldParams field = require_field(cc);
  const std::string format = resolve_format(ctx.opt, "csv", {"csv", "json", "svg"});
  const int grid = ctx.opt.grid.value_or(kDefaultGrid);
  if (grid < 3) throw ValidationError("--grid must be >= 3");
  require_strong_field(cc.curve, field);
  ctx.effective["resolved"] = {{"grid", grid}};

  const double r = field.r;
  std::string content;
  if (format == "csv") {
    content = "u,x,y,k,x_minus,y_minus,k_minus,x_plus,y_plus,k_plus\n";
    for (int i = 0; i < grid; ++i) {
      const double u = kTwoPi * i / grid;
      const FrameSample f = eval_frame(cc.curve, u);
      const Vec2 pm = offset_point(cc.curve, u, -r), pp = offset_point(cc.curve, u, r);
      content += csv_row({u, f.point.x, f.point.y, f.curvature, pm.x, pm.y, offset_curvature(cc.curve, u, -r), pp.x,
                          pp.y, offset_curvature(cc.curve, u, r)});
    }
  } else if (format == "json") {
    json rows = json::array();
    for (int i = 0; i < grid; ++i) {
      const double u = kTwoPi * i / grid;
      const FrameSample f = eval_frame(cc.curve, u);
      rows.push_back({{"u", u},
                      {"point", vec_json(f.point)},
                      {"k", f.curvature},
                      {"minus", vec_json(offset_point(cc.curve, u, -r))},
                      {"k_minus", offset_curvature(cc.curve, u, -r)},
                      {"plus", vec_json(offset_point(cc.curve, u, r))},
                      {"k_plus", offset_curvature(cc.curve, u, r)}});
    }
    content = json{{"r", r}, {"samples", rows}}.dump(2) + "\n";
  } else {
    SvgScene scene;
    scene.paths.push_back({sample_curve(cc.curve, grid), true});
    scene.paths.push_back({sample_curve(cc.curve, grid, -r), true, palette_colour(0)});
    scene.paths.push_back({sample_curve(cc.curve, grid, r), true, palette_colour(1)});
    content = export_svg(scene);
  }
  emit(ctx, "offset", format, content);
  return kExitOk;
}

// ---------------------------------------------------------------- integrability

json constancy_json(const ConstancyResidual& c) {
  return {{"mean", c.mean},
          {"max_deviation", c.max_deviation},
          {"relative_deviation", c.relative_deviation()},
          {"curvature_margin", c.curvature_margin}};
}

json point_json(const ComplexPoint& p) {
  return {{"x", {p.x.real(), p.x.imag()}}, {"y", {p.y.real(), p.y.imag()}}};
}

int cmd_integrability(Context& ctx) {
  const CurveConfig cc = curve_config_from_json(ctx.config);
  const FieldParams field = require_field(cc);
  resolve_format(ctx.opt, "json", {"json"});
  const int grid = ctx.opt.grid.value_or(256);
  if (grid < 1) throw ValidationError("--grid must be >= 1");
  require_strong_field(cc.curve, field);
  ctx.effective["resolved"] = {{"grid", grid}};

  BivariatePolynomial F;
  std::string source;
  if (ctx.config.contains("polynomial")) {
    F = polynomial_from_json(ctx.config.at("polynomial"));
    source = "config";
  } else if (const auto* e = std::get_if<EllipseShape>(&cc.curve.shape()); e && e->a != e->b) {
    F = ellipse_offset_poly(e->a, e->b, field.r);
    source = "ellipse_offset";
  } else if (const auto* c = std::get_if<CircleShape>(&cc.curve.shape())) {
    const BivariatePolynomial X = BivariatePolynomial::x() - c->center.x, Y = BivariatePolynomial::y() - c->center.y;
    F = X * X + Y * Y - (c->radius - field.r) * (c->radius - field.r);
    source = "circle_invariant";
  } else {
    throw ValidationError("no default polynomial for this table; supply 'polynomial'");
  }

  json report;
  report["source"] = source;
  report["polynomial"] = polynomial_to_json(F);
  report["beta"] = field.beta;

  json eq13 = json::array();
  for (double t : {field.r, -field.r}) {
    const auto pts = sample_curve(cc.curve, grid, t);
    for (int sign : {+1, -1}) {
      json row = constancy_json(residual_equation13(F, pts, field.beta, sign));
      row["offset"] = t > 0 ? "+r" : "-r";
      row["sign"] = sign;
      eq13.push_back(row);
    }
  }
  report["residual_equation13"] = eq13;

  json eps3 = json::array();
  const int eps_samples = std::min(grid, 16);
  for (int i = 0; i < eps_samples; ++i) {
    const double u = kTwoPi * (i + 0.5) / eps_samples;
    for (int sign : {+1, -1}) {
      const Eps3Check e = eps3_check(F, cc.curve, field, u, sign);
      eps3.push_back({{"u", u},
                      {"sign", sign},
                      {"analytic", e.analytic},
                      {"numeric", e.numeric},
                      {"relative_error", e.relative_error()},
                      {"even_coefficient_max", e.even_coefficient_max}});
    }
  }
  report["eps3"] = eps3;

  const BoundaryConstancy bc = boundary_constancy(F, cc.curve, field);
  report["boundary_constancy"] = {{"const_minus", bc.const_minus},
                                  {"const_plus", bc.const_plus},
                                  {"deviation_minus", bc.deviation_minus},
                                  {"deviation_plus", bc.deviation_plus}};

  if (F.degree() >= 2) {
    const InfinityReport inf = infinity_analysis(F);
    json pts = json::array();
    for (const auto& p : inf.points) {
      json row = point_json(p.direction);
      row["multiplicity"] = p.multiplicity;
      row["kind"] = to_string(p.kind);
      row["grad_xy"] = p.grad_xy;
      row["grad_z"] = p.grad_z;
      pts.push_back(row);
    }
    report["infinity"] = {{"degree", inf.degree}, {"points", pts}, {"trichotomy_holds", inf.trichotomy_holds()}};
  }

  if (const auto* e = std::get_if<EllipseShape>(&cc.curve.shape()); e && e->a != e->b) {
    json sing = json::array();
    for (const auto& s : ellipse_offset_singularities(e->a, e->b, field.r)) {
      json row = point_json(s.point);
      row["is_real"] = s.is_real;
      row["value_relative"] = s.value_relative;
      row["gradient_relative"] = s.gradient_relative;
      sing.push_back(row);
    }
    report["ellipse_offset_singularities"] = sing;
  }
  report["tolerances"] = {{"singular_gradient", 1e-12}, {"eps3_step_over_r", 1e-2}};

  emit(ctx, "integrability", "json", report.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- gutkin

int cmd_gutkin_check(Context& ctx) {
  const CurveConfig cc = curve_config_from_json(ctx.config);
  const FieldParams field = require_field(cc);
  const std::string format = resolve_format(ctx.opt, "csv", {"csv", "json", "svg"});
  const double delta = ctx.opt.delta.value_or(config_number(ctx.config, "delta", kPi / 2));
  const int grid = ctx.opt.grid.value_or(512);
  if (!(delta > 0.0 && delta < kPi)) throw ValidationError("--delta must lie in (0, pi)");
  if (grid < 512) throw ValidationError("--grid must be >= 512 for the midpoint velocity difference");
  if (!ctx.opt.allow_weak_field) require_strong_field(cc.curve, field);
  ctx.effective["resolved"] = {{"delta", delta}, {"grid", grid}, {"allow_weak_field", ctx.opt.allow_weak_field}};

  const ZindlerReport z = zindler_report(cc.curve, field, delta, grid);
  double max_dev = 0.0;
  std::vector<Vec2> gamma, mids;
  for (const auto& row : z.rows) {
    max_dev = std::max(max_dev, std::abs(row.chord.exit_angle - delta));
    gamma.push_back(row.chord.p_minus);
    mids.push_back(row.chord.midpoint);
  }
  const GammaInvariance gi = gamma_invariance_check(cc.curve, field, delta, std::min(grid, 256));
  const json summary = {{"delta", delta},
                        {"gutkin_residual", max_dev},
                        {"max_chord_length_error", z.max_chord_length_error},
                        {"max_tangency_error", z.max_tangency_error},
                        {"max_isosceles_error", z.max_isosceles_error},
                        {"max_midpoint_distance_error", z.max_midpoint_distance_error},
                        {"max_velocity_angle", z.max_velocity_angle},
                        {"gamma_invariance", gi.max_distance_to_gamma},
                        {"gamma_image_vs_p_plus", gi.max_distance_to_p_plus}};

  std::string content;
  if (format == "csv") {
    content = "phi_bar,d,exit_angle,pmx,pmy,ppx,ppy,mx,my,chord_len,mid_dist\n";
    for (const auto& row : z.rows) {
      const ChordRecord& c = row.chord;
      content += csv_row({c.phi_bar, c.d, c.exit_angle, c.p_minus.x, c.p_minus.y, c.p_plus.x, c.p_plus.y,
                          c.midpoint.x, c.midpoint.y, c.chord_length(), row.midpoint_distance});
    }
  } else if (format == "json") {
    json rows = json::array();
    for (const auto& row : z.rows) {
      const ChordRecord& c = row.chord;
      rows.push_back({{"phi_bar", c.phi_bar},
                      {"d", c.d},
                      {"exit_angle", c.exit_angle},
                      {"p_minus", vec_json(c.p_minus)},
                      {"p_plus", vec_json(c.p_plus)},
                      {"midpoint", vec_json(c.midpoint)},
                      {"chord_len", c.chord_length()},
                      {"mid_dist", row.midpoint_distance},
                      {"velocity_angle", row.velocity_angle}});
    }
    content = json{{"summary", summary}, {"chords", rows}}.dump(2) + "\n";
  } else {
    SvgScene scene;
    scene.paths.push_back({sample_curve(cc.curve, grid), true});
    scene.paths.push_back({gamma, true, palette_colour(0)});
    scene.paths.push_back({mids, true, palette_colour(1)});
    content = export_svg(scene);
  }
  emit(ctx, "zindler", format, content);
  ctx.out << summary.dump() << "\n";
  return kExitOk;
}

int cmd_gutkin_construct(Context& ctx) {
  resolve_format(ctx.opt, "json", {"json"});
  const int n = ctx.opt.n.value_or(int(config_number(ctx.config, "n", 4)));
  const double delta = ctx.opt.delta.value_or(config_number(ctx.config, "delta", kPi / 2));
  const double eps = ctx.opt.epsilon.value_or(config_number(ctx.config, "epsilon", 0.01));
  const int grid = ctx.opt.grid.value_or(256);
  if (n < 2) throw ValidationError("mode n must be >= 2");
  if (!(delta > 0.0 && delta < kPi)) throw ValidationError("delta must lie in (0, pi)");
  if (grid < 8) throw ValidationError("--grid must be >= 8");
  ctx.effective["resolved"] = {{"n", n}, {"delta", delta}, {"epsilon", eps}, {"grid", grid}, {"refine", ctx.opt.refine}};

  const GutkinConstruction g = perturbed_gutkin_curve(n, delta, eps);
  const GutkinConstruction half = perturbed_gutkin_curve(n, delta, 0.5 * eps);
  const double res = gutkin_residual(g.curve, g.field, delta, grid).max_deviation;
  const double res_half = gutkin_residual(half.curve, half.field, delta, grid).max_deviation;
  const double eq6 = eq6_residual(g.curve, g.field, delta, grid).max_residual;
  const double eq6_half = eq6_residual(half.curve, half.field, delta, grid).max_residual;

  json out = {{"curve", curve_to_json(g.curve)},
              {"beta", g.seed.beta},
              {"delta", delta},
              {"d0", g.seed.d0},
              {"n", n},
              {"epsilon", eps},
              {"d1_amplitude", g.d1_amplitude},
              {"admissibility",
               {{"r_times_max_curvature", g.admissibility.r_times_max_curvature},
                {"curvature_ok", g.admissibility.curvature_ok},
                {"offsets_simple", g.admissibility.offsets_simple},
                {"pass", g.admissibility.pass()}}},
              {"report",
               {{"gutkin_residual", res},
                {"gutkin_residual_half_epsilon", res_half},
                {"gutkin_ratio", res_half > 0.0 ? res / res_half : 0.0},
                {"eq6_residual", eq6},
                {"eq6_residual_half_epsilon", eq6_half},
                {"eq6_ratio", eq6_half > 0.0 ? eq6 / eq6_half : 0.0}}}};
  if (ctx.opt.refine) {
    const RefinementResult rr = refine_gutkin_curve(g);
    out["refinement"] = {{"experimental", true},
                         {"converged", rr.converged},
                         {"iterations", rr.iterations},
                         {"initial_residual", rr.initial_residual},
                         {"final_residual", rr.final_residual},
                         {"message", rr.message},
                         {"curve",
                          {{"type", "fourier_rho"}, {"c0", rr.shape.c0}, {"cos", rr.shape.cos_coeffs}, {"sin", rr.shape.sin_coeffs}}},
                         {"d_cos", rr.d_cos},
                         {"d_sin", rr.d_sin}};
  }
  emit(ctx, "gutkin_construction", "json", out.dump(2) + "\n");
  ctx.out << out.at("report").dump() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- circles-test

int cmd_circles_test(Context& ctx) {
  const CurveConfig cc = curve_config_from_json(ctx.config);
  const FieldParams field = require_field(cc);
  resolve_format(ctx.opt, "json", {"json"});
  const int circles = ctx.opt.grid.value_or(32);
  const double tol = ctx.opt.tol.value_or(1e-9);
  if (circles < 1) throw ValidationError("--grid must be >= 1");
  if (!(tol > 0.0)) throw ValidationError("--tol must be positive");

  std::function<double(Vec2)> fn;
  std::string label;
  int default_n = 3;
  if (ctx.config.contains("function")) {
    if (ctx.config.at("function") != "exp") throw ValidationError("'function' must be \"exp\"");
    fn = [](Vec2 p) { return std::exp(p.x); };
    label = "exp(x)";
  } else if (ctx.config.contains("polynomial")) {
    const BivariatePolynomial F = polynomial_from_json(ctx.config.at("polynomial"));
    fn = [F](Vec2 p) { return F(p); };
    label = "polynomial";
    default_n = std::max(F.degree(), 0);
  } else {
    throw ValidationError("circles-test needs 'polynomial' or \"function\": \"exp\" in the config");
  }
  const int N = ctx.opt.n.value_or(default_n);
  if (N < 0) throw ValidationError("--n must be >= 0");
  int samples = 64;
  while (samples < 4 * N + 4) samples *= 2;
  ctx.effective["resolved"] = {{"circles", circles}, {"N", N}, {"samples_per_circle", samples}, {"tol", tol}};

  json rows = json::array();
  bool all_pass = true;
  std::vector<Vec2> pts;
  std::vector<double> vals;
  for (int i = 0; i < circles; ++i) {
    const Vec2 c = cc.curve.position(kTwoPi * i / circles);
    const CircleSampleSet s = CircleSampleSet::sample(fn, c, field.r, samples);
    const FourierDegreeResult res = circle_fourier_degree_test(s, N, tol);
    all_pass = all_pass && res.passed;
    rows.push_back({{"center", vec_json(c)}, {"passed", res.passed}, {"tail_max", res.tail_max}, {"coeff_max", res.coeff_max}});
    for (int j = 0; j < samples; ++j) {
      pts.push_back(c + field.r * unit(kTwoPi * j / samples));
      vals.push_back(s.values[std::size_t(j)]);
    }
  }
  json report = {{"function", label}, {"N", N}, {"circles", rows}, {"all_circles_pass", all_pass}};
  try {
    const PolyFitResult fit = global_poly_fit(pts, vals, 2 * N);
    report["fit"] = {{"degree", 2 * N},
                     {"max_residual", fit.max_residual},
                     {"relative_residual", fit.relative_residual},
                     {"polynomial", polynomial_to_json(fit.polynomial)}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidConfig && e.code() != ErrorCode::IllConditionedFit) throw;
    report["fit"] = {{"degree", 2 * N}, {"error", e.what()}};
  }
  emit(ctx, "circles_test", "json", report.dump(2) + "\n");
  ctx.out << json{{"N", N}, {"all_circles_pass", all_pass}}.dump() << "\n";
  return kExitOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON configuration file");
  sub->add_option("--out", o.out_dir, "Output directory");
  sub->add_option("--format", o.format, "Output format: csv, json or svg");
  sub->add_option("--steps", o.steps, "Number of map iterations");
  sub->add_option("--grid", o.grid, "Grid size");
  sub->add_option("--delta", o.delta, "Incidence angle in (0, pi)");
  sub->add_option("--seed", o.seed, "Seed for grid jitter");
  sub->add_option("--tol", o.tol, "Tolerance");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Magnetic billiards in a strong constant field", "magbill"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(Context&);
  };
  const Sub subs[] = {
      {"simulate", "Iterate the boundary map or the center map and write the trajectory", cmd_simulate},
      {"portrait", "Phase portrait of the center map from a grid of initial conditions", cmd_portrait},
      {"offset", "Parallel curves at distance r with their curvatures", cmd_offset},
      {"integrability", "Polynomial-integral residuals and algebraic diagnostics", cmd_integrability},
      {"gutkin-check", "delta-chord residual and constant-chord diagnostics", cmd_gutkin_check},
      {"gutkin-construct", "First-order perturbative Gutkin table", cmd_gutkin_construct},
      {"circles-test", "Fourier degree test on circles plus global polynomial fit", cmd_circles_test},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> registered;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, opt);
    registered.emplace_back(sub, &s);
  }
  registered[0].first->add_option("--mode", opt.mode, "boundary or center");
  registered[4].first->add_flag("--allow-weak-field", opt.allow_weak_field,
                                "Shoot chords even if the strong-field check fails");
  registered[5].first->add_option("--n", opt.n, "Fourier mode");
  registered[5].first->add_option("--epsilon", opt.epsilon, "Perturbation amplitude");
  registered[5].first->add_flag("--refine", opt.refine, "Run the experimental Fourier-space refinement");
  registered[6].first->add_option("--n", opt.n, "Target degree N");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const Sub* chosen = nullptr;
  for (const auto& [sub, s] : registered)
    if (sub->parsed()) chosen = s;
  opt.subcommand = chosen->name;

  try {
    json config = opt.config_path.empty() && opt.subcommand == "gutkin-construct" ? json::object()
                                                                                    : load_config(opt.config_path);
    json effective = {{"subcommand", opt.subcommand}, {"config", config}};
    json flags = json::object();
    if (opt.steps) flags["steps"] = *opt.steps;
    if (opt.grid) flags["grid"] = *opt.grid;
    if (opt.delta) flags["delta"] = *opt.delta;
    if (opt.seed) flags["seed"] = *opt.seed;
    if (opt.tol) flags["tol"] = *opt.tol;
    if (opt.n) flags["n"] = *opt.n;
    if (opt.epsilon) flags["epsilon"] = *opt.epsilon;
    if (!opt.format.empty()) flags["format"] = opt.format;
    flags["mode"] = opt.mode;
    effective["flags"] = flags;
    Context ctx{opt, std::move(config), std::move(effective), out, err};
    return chosen->fn(ctx);
  } catch (const Error& e) {
    err << "magbill " << opt.subcommand << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    err << "magbill " << opt.subcommand << ": malformed config: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "magbill " << opt.subcommand << ": " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace magbill::cli
