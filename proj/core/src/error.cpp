#include "slicekit/error.hpp"

namespace slicekit {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::MalformedAscii: return "MalformedAscii";
        case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
        case ErrorCode::EmptyMesh: return "EmptyMesh";
        case ErrorCode::LayerHeightOutOfRange: return "LayerHeightOutOfRange";
        case ErrorCode::SelfIntersectingContour: return "SelfIntersectingContour";
        case ErrorCode::InvalidFlowParameters: return "InvalidFlowParameters";
        case ErrorCode::InfeasibleFlow: return "InfeasibleFlow";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::PlanOutOfBounds: return "PlanOutOfBounds";
        case ErrorCode::MalformedLine: return "MalformedLine";
        case ErrorCode::NegativeFeedrate: return "NegativeFeedrate";
        case ErrorCode::InvalidProfile: return "InvalidProfile";
        case ErrorCode::ProfileSyntax: return "ProfileSyntax";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::LayerHeightOutOfRange:
        case ErrorCode::InvalidFlowParameters:
        case ErrorCode::InfeasibleFlow:
        case ErrorCode::InvalidArgument:
        case ErrorCode::PlanOutOfBounds:
        case ErrorCode::InvalidProfile:
        case ErrorCode::SelfIntersectingContour:
            return true;
        default:
            return false;
    }
}

}  // namespace slicekit
