#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slicekit {

enum class ErrorCode {
    EmptyInput,
    TruncatedFile,
    MalformedAscii,
    NonFiniteCoordinate,
    EmptyMesh,
    LayerHeightOutOfRange,
    SelfIntersectingContour,
    InvalidFlowParameters,
    InfeasibleFlow,
    InvalidArgument,
    PlanOutOfBounds,
    MalformedLine,
    NegativeFeedrate,
    InvalidProfile,
    ProfileSyntax,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Validation failures are problems with otherwise well-formed input (values
/// outside machine or material limits). Everything else is an I/O or parse
/// failure. The CLI maps the two classes onto exit codes 2 and 1.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace slicekit
