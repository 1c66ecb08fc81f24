#include <magbill/errors.hpp>

namespace magbill {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonConvexRepresentation: return "NonConvexRepresentation";
    case ErrorCode::OffsetTooLarge: return "OffsetTooLarge";
    case ErrorCode::FocalPointCrossed: return "FocalPointCrossed";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::NoExitFound: return "NoExitFound";
    case ErrorCode::GrazingIntersection: return "GrazingIntersection";
    case ErrorCode::NotInAnnulus: return "NotInAnnulus";
    case ErrorCode::StencilOutOfDomain: return "StencilOutOfDomain";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::DegenerateLeadingForm: return "DegenerateLeadingForm";
    case ErrorCode::ConcentricDegenerate: return "ConcentricDegenerate";
    case ErrorCode::RootsOffUnitCircle: return "RootsOffUnitCircle";
    case ErrorCode::IllConditionedFit: return "IllConditionedFit";
    case ErrorCode::ChordSolveFailure: return "ChordSolveFailure";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::DegenerateLinearization: return "DegenerateLinearization";
    case ErrorCode::InconsistentModes: return "InconsistentModes";
    case ErrorCode::EmptyPlot: return "EmptyPlot";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace magbill
