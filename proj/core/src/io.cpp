#include <magbill/errors.hpp>
#include <magbill/io.hpp>

#include <string>

namespace magbill {

namespace {

using nlohmann::json;

double number_field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::InvalidConfig, std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorCode::InvalidConfig, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> number_list(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  const json& v = j.at(key);
  if (!v.is_array()) throw Error(ErrorCode::InvalidConfig, std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw Error(ErrorCode::InvalidConfig, std::string("non-numeric entry in '") + key + "'");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

PlaneCurve curve_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw Error(ErrorCode::InvalidConfig, "curve needs a string 'type'");
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "circle") {
    Vec2 center{};
    if (j.contains("center")) {
      const auto c = number_list(j, "center");
      if (c.size() != 2) throw Error(ErrorCode::InvalidConfig, "circle center must have two entries");
      center = {c[0], c[1]};
    }
    return PlaneCurve::circle(number_field(j, "radius"), center);
  }
  if (type == "ellipse") return PlaneCurve::ellipse(number_field(j, "a"), number_field(j, "b"));
  if (type == "fourier_rho") return curve_from_rho(number_field(j, "c0"), number_list(j, "cos"), number_list(j, "sin"));
  throw Error(ErrorCode::InvalidConfig, "unknown curve type '" + type + "'");
}

CurveConfig curve_config_from_json(const json& j) {
  if (!j.is_object() || !j.contains("curve")) throw Error(ErrorCode::InvalidConfig, "config needs a 'curve' object");
  CurveConfig cfg{curve_from_json(j.at("curve")), std::nullopt};
  if (j.contains("beta")) {
    const double beta = number_field(j, "beta");
    if (!(beta > 0.0)) throw Error(ErrorCode::InvalidConfig, "beta must be positive");
    cfg.beta = beta;
  }
  return cfg;
}

json curve_to_json(const PlaneCurve& curve) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CircleShape>) {
          return {{"type", "circle"}, {"radius", s.radius}, {"center", {s.center.x, s.center.y}}};
        } else if constexpr (std::is_same_v<T, EllipseShape>) {
          return {{"type", "ellipse"}, {"a", s.a}, {"b", s.b}};
        } else {
          return {{"type", "fourier_rho"}, {"c0", s.c0}, {"cos", s.cos_coeffs}, {"sin", s.sin_coeffs}};
        }
      },
      curve.shape());
}

json polynomial_to_json(const BivariatePolynomial& p) {
  json terms = json::array();
  for (const Term& t : p.terms()) terms.push_back({{"i", t.i}, {"j", t.j}, {"c", t.c}});
  return {{"degree", p.degree()}, {"terms", terms}};
}

BivariatePolynomial polynomial_from_json(const json& j) {
  if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array()) {
    throw Error(ErrorCode::InvalidConfig, "polynomial needs a 'terms' array");
  }
  std::vector<Term> terms;
  for (const auto& t : j.at("terms")) {
    if (!t.is_object() || !t.contains("i") || !t.contains("j") || !t.contains("c") || !t.at("i").is_number_integer() ||
        !t.at("j").is_number_integer() || !t.at("c").is_number()) {
      throw Error(ErrorCode::InvalidConfig, "each term needs integer 'i', 'j' and numeric 'c'");
    }
    terms.push_back({t.at("i").get<int>(), t.at("j").get<int>(), t.at("c").get<double>()});
  }
  BivariatePolynomial p = BivariatePolynomial::from_terms(terms);
  if (j.contains("degree")) {
    if (!j.at("degree").is_number_integer()) throw Error(ErrorCode::InvalidConfig, "'degree' must be an integer");
    const int declared = j.at("degree").get<int>();
    if (p.degree() > declared) {
      throw Error(ErrorCode::InvalidConfig, "terms exceed the declared degree " + std::to_string(declared));
    }
  }
  return p;
}

std::string version() { return MAGBILL_VERSION_STRING; }

}  // namespace magbill
