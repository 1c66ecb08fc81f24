#pragma once

#include <numbers>

namespace magbill {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Default parameter grid for curve sampling.
inline constexpr int kDefaultGrid = 1024;
/// Grid used for bracketing circle/curve crossings and self-intersection sweeps.
inline constexpr int kCrossingGrid = 2048;

/// Reduce an angle to [0, 2pi).
double wrap_two_pi(double angle);
/// Reduce an angle to (-pi, pi].
double wrap_pi(double angle);

}  // namespace magbill
