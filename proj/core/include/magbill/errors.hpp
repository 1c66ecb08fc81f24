#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace magbill {

enum class ErrorCode {
  // curve_geometry
  NonConvexRepresentation,
  OffsetTooLarge,
  FocalPointCrossed,
  NotClosed,
  // larmor_dynamics
  NoExitFound,
  GrazingIntersection,
  NotInAnnulus,
  StencilOutOfDomain,
  // integrability
  SingularPoint,
  NotApplicable,
  DegenerateLeadingForm,
  ConcentricDegenerate,
  RootsOffUnitCircle,
  IllConditionedFit,
  // gutkin
  ChordSolveFailure,
  NoSolution,
  DegenerateLinearization,
  InconsistentModes,
  // cli
  EmptyPlot,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// An error raised while folding a map over many steps; `step()` is the
/// index of the state whose image could not be computed.
class StepError : public Error {
 public:
  StepError(const Error& cause, std::size_t step)
      : Error(cause.code(), "step " + std::to_string(step) + ": " + cause.what()), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace magbill
