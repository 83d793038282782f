#include "intent_cbr/error.hpp"

namespace intent_cbr {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::ValidationFailure: return "ValidationFailure";
        case ErrorCode::MalformedRecord: return "MalformedRecord";
        case ErrorCode::DuplicateEvidenceId: return "DuplicateEvidenceId";
        case ErrorCode::ConfidenceOutOfRange: return "ConfidenceOutOfRange";
        case ErrorCode::DuplicateCaseId: return "DuplicateCaseId";
        case ErrorCode::UnknownCaseId: return "UnknownCaseId";
        case ErrorCode::IllegalTransition: return "IllegalTransition";
        case ErrorCode::UnnormalizedWeights: return "UnnormalizedWeights";
        case ErrorCode::UnknownEvidence: return "UnknownEvidence";
        case ErrorCode::UnknownIntention: return "UnknownIntention";
        case ErrorCode::FrameMismatch: return "FrameMismatch";
        case ErrorCode::SubsetOutsideFrame: return "SubsetOutsideFrame";
        case ErrorCode::NoHypothesis: return "NoHypothesis";
        case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
        case ErrorCode::CorruptRecord: return "CorruptRecord";
        case ErrorCode::EmptyRepository: return "EmptyRepository";
        case ErrorCode::EmptyRanking: return "EmptyRanking";
        case ErrorCode::ZeroMarginal: return "ZeroMarginal";
        case ErrorCode::TotalConflict: return "TotalConflict";
        case ErrorCode::EmptyPosteriors: return "EmptyPosteriors";
        case ErrorCode::AllZeroPosteriors: return "AllZeroPosteriors";
    }
    return "Unknown";
}

}  // namespace intent_cbr
