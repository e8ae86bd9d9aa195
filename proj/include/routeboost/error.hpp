#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace routeboost {

enum class ErrorCode {
    // input / configuration
    Io,
    Config,
    MalformedCsv,
    UnknownTarget,
    DuplicateSignal,
    // domain
    UnknownSignal,
    RowOutOfRange,
    ConflictingValues,
    OverlappingGroups,
    NoBaseSignals,
    UnknownGroup,
    EmptySegment,
    NoQualifyingRoutes,
    EmptySubset,
    NotNested,
    DuplicateFeatureSet,
    EmptyTrainingSet,
    SingularSystem,
    ArityMismatch,
    NoApplicableModel,
    InvalidLayout,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by unreadable or ill-formed inputs (CLI exit code 2);
/// everything else is a domain error (exit code 1).
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace routeboost
