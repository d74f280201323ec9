#include "esurf/common.hpp"

namespace esurf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::defective_pair: return "DefectivePair";
    case ErrorCode::ambiguous_match: return "AmbiguousMatch";
    case ErrorCode::near_degenerate: return "NearDegenerate";
    case ErrorCode::negative_determinant: return "NegativeDeterminant";
    case ErrorCode::stencil_crosses_ep: return "StencilCrossesEP";
    case ErrorCode::grid_hits_ep: return "GridHitsEP";
    case ErrorCode::ep_on_path: return "EPOnPath";
    case ErrorCode::no_closure: return "NoClosure";
    case ErrorCode::ref_on_spectrum: return "RefOnSpectrum";
    case ErrorCode::step_size_underflow: return "StepSizeUnderflow";
    case ErrorCode::truncation_violation: return "TruncationViolation";
    case ErrorCode::vanishing_projection: return "VanishingProjection";
    case ErrorCode::singular_state_matrix: return "SingularStateMatrix";
    case ErrorCode::branch_ambiguity: return "BranchAmbiguity";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace esurf
