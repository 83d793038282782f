#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intent_cbr {

/// Observable evidence categories. Comparators in the CBR engine dispatch on
/// this set, so it is closed; anything unrecognised becomes `Other`.
enum class EvidenceKind {
    PortExploit,
    FunctionImplementation,
    ToolUsage,
    CommandUsage,
    RegistryAccess,
    AddressIndicator,
    ProtocolIndicator,
    VulnerabilityIndicator,
    Other,
};

std::string_view to_string(EvidenceKind kind) noexcept;
/// Exact match on the canonical hyphenated name ("tool-usage", ...).
std::optional<EvidenceKind> parse_evidence_kind(std::string_view name) noexcept;

struct Evidence {
    std::string id;
    EvidenceKind kind = EvidenceKind::Other;
    std::map<std::string, std::string> attributes;
    std::string description;
    double confidence = 1.0;

    friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct Attack {
    std::string id;
    std::string name;
    double detection_state = 1.0;  // accuracy ratio of the detector that flagged it
    std::vector<Evidence> evidence;

    const Evidence* find_evidence(std::string_view evidence_id) const noexcept;

    friend bool operator==(const Attack&, const Attack&) = default;
};

struct Intention {
    std::string id;
    std::string label;
    std::optional<std::string> category;

    friend bool operator==(const Intention&, const Intention&) = default;
};

inline constexpr std::string_view kAnyIntention = "*";

struct Hypothesis {
    std::string id;
    double accuracy = 1.0;
    std::string applies_to{kAnyIntention};

    friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

/// Attack -> evidence -> intention structure carrying P(evidence | intention)
/// and the intention priors. The likelihood table is dense.
struct CausalNetwork {
    std::string attack_id;
    std::vector<Intention> intentions;
    std::vector<std::string> evidence_ids;
    std::map<std::string, double> priors;
    // likelihoods[evidence_id][intention_id]
    std::map<std::string, std::map<std::string, double>> likelihoods;

    /// Throws UnknownEvidence / UnknownIntention for ids outside the table.
    double likelihood(std::string_view evidence_id, std::string_view intention_id) const;
    bool has_evidence(std::string_view evidence_id) const noexcept;
    const Intention* find_intention(std::string_view intention_id) const noexcept;

    friend bool operator==(const CausalNetwork&, const CausalNetwork&) = default;
};

enum class CaseStatus {
    Precedent,
    Proposed,
    Incipient,
    RevisedAccepted,
    RevisedRejected,
    Retained,
};

std::string_view to_string(CaseStatus status) noexcept;
std::optional<CaseStatus> parse_case_status(std::string_view name) noexcept;

/// Precedent and retained cases are the ones retrieval may match against.
constexpr bool is_confirmed(CaseStatus status) noexcept {
    return status == CaseStatus::Precedent || status == CaseStatus::Retained;
}

struct Case {
    std::string case_id;
    Attack attack;
    std::optional<Intention> intention;
    std::map<std::string, double> evidence_weights;
    CaseStatus status = CaseStatus::Proposed;
    std::string provenance;
    std::string created_at;  // ISO-8601 UTC

    friend bool operator==(const Case&, const Case&) = default;
};

struct AlignedPair {
    std::string new_evidence_id;
    std::string precedent_evidence_id;
    double local_sim = 0.0;

    friend bool operator==(const AlignedPair&, const AlignedPair&) = default;
};

struct SimilarityResult {
    std::string new_case_id;
    std::string precedent_case_id;
    std::vector<AlignedPair> alignment;
    double score = 0.0;
};

struct Violation {
    std::string field;
    std::string rule;

    friend bool operator==(const Violation&, const Violation&) = default;
};

inline constexpr double kProbabilityTolerance = 1e-9;

std::vector<Violation> validate_attack(const Attack& attack);
/// Total over well-formed input: reports every broken invariant, never throws.
std::vector<Violation> validate_case(const Case& c);
std::vector<Violation> validate_network(const CausalNetwork& network);

std::string describe(const std::vector<Violation>& violations);

/// Ids double as file names in the repository.
bool is_safe_identifier(std::string_view id) noexcept;

bool is_legal_transition(CaseStatus from, CaseStatus to) noexcept;

/// Copy of `c` with the new status. Throws IllegalTransition off the life-cycle
/// graph proposed -> incipient -> (revised-accepted -> retained | revised-rejected).
Case transition(const Case& c, CaseStatus target);

/// Sum of the case's weights over its own evidence ids.
double weight_sum(const Case& c);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ". Honours SOURCE_DATE_EPOCH so
/// repeated runs can be made byte-identical.
std::string utc_timestamp();

}  // namespace intent_cbr
