#include "routeboost/error.hpp"

namespace routeboost {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Io: return "IoError";
        case ErrorCode::Config: return "ConfigError";
        case ErrorCode::MalformedCsv: return "MalformedCsv";
        case ErrorCode::UnknownTarget: return "UnknownTarget";
        case ErrorCode::DuplicateSignal: return "DuplicateSignal";
        case ErrorCode::UnknownSignal: return "UnknownSignal";
        case ErrorCode::RowOutOfRange: return "RowOutOfRange";
        case ErrorCode::ConflictingValues: return "ConflictingValues";
        case ErrorCode::OverlappingGroups: return "OverlappingGroups";
        case ErrorCode::NoBaseSignals: return "NoBaseSignals";
        case ErrorCode::UnknownGroup: return "UnknownGroup";
        case ErrorCode::EmptySegment: return "EmptySegment";
        case ErrorCode::NoQualifyingRoutes: return "NoQualifyingRoutes";
        case ErrorCode::EmptySubset: return "EmptySubset";
        case ErrorCode::NotNested: return "NotNested";
        case ErrorCode::DuplicateFeatureSet: return "DuplicateFeatureSet";
        case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::NoApplicableModel: return "NoApplicableModel";
        case ErrorCode::InvalidLayout: return "InvalidLayout";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

bool is_input_error(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Io:
        case ErrorCode::Config:
        case ErrorCode::MalformedCsv:
        case ErrorCode::UnknownTarget:
        case ErrorCode::DuplicateSignal:
            return true;
        default:
            return false;
    }
}

}  // namespace routeboost
