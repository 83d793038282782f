#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace intent_cbr {

enum class ErrorCode {
    // I/O
    IoFailure,
    // validation
    ValidationFailure,
    MalformedRecord,
    DuplicateEvidenceId,
    ConfidenceOutOfRange,
    DuplicateCaseId,
    UnknownCaseId,
    IllegalTransition,
    UnnormalizedWeights,
    UnknownEvidence,
    UnknownIntention,
    FrameMismatch,
    SubsetOutsideFrame,
    NoHypothesis,
    SchemaVersionMismatch,
    CorruptRecord,
    // empty inputs
    EmptyRepository,
    EmptyRanking,
    // analysis
    ZeroMarginal,
    TotalConflict,
    EmptyPosteriors,
    AllZeroPosteriors,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto its exit-code contract.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace intent_cbr
