#pragma once

#include <magbill/curve.hpp>
#include <magbill/polynomial.hpp>

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace magbill {

/// Parsed {"curve": {...}, "beta": B} configuration.
struct CurveConfig {
  PlaneCurve curve;
  std::optional<double> beta;
};

/// Throws InvalidConfig on a missing or malformed field and propagates the
/// curve constructors' own validation errors.
PlaneCurve curve_from_json(const nlohmann::json& j);
CurveConfig curve_config_from_json(const nlohmann::json& j);

nlohmann::json curve_to_json(const PlaneCurve& curve);

/// {"degree": D, "terms": [{"i": .., "j": .., "c": ..}, ...]}
nlohmann::json polynomial_to_json(const BivariatePolynomial& p);
BivariatePolynomial polynomial_from_json(const nlohmann::json& j);

/// Library version string.
std::string version();

}  // namespace magbill
