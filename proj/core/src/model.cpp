#include "intent_cbr/model.hpp"

#include "intent_cbr/error.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <set>
#include <sstream>
#include <utility>

namespace intent_cbr {

namespace {

constexpr std::array<std::pair<EvidenceKind, std::string_view>, 9> kKindNames{{
    {EvidenceKind::PortExploit, "port-exploit"},
    {EvidenceKind::FunctionImplementation, "function-implementation"},
    {EvidenceKind::ToolUsage, "tool-usage"},
    {EvidenceKind::CommandUsage, "command-usage"},
    {EvidenceKind::RegistryAccess, "registry-access"},
    {EvidenceKind::AddressIndicator, "address-indicator"},
    {EvidenceKind::ProtocolIndicator, "protocol-indicator"},
    {EvidenceKind::VulnerabilityIndicator, "vulnerability-indicator"},
    {EvidenceKind::Other, "other"},
}};

constexpr std::array<std::pair<CaseStatus, std::string_view>, 6> kStatusNames{{
    {CaseStatus::Precedent, "precedent"},
    {CaseStatus::Proposed, "proposed"},
    {CaseStatus::Incipient, "incipient"},
    {CaseStatus::RevisedAccepted, "revised-accepted"},
    {CaseStatus::RevisedRejected, "revised-rejected"},
    {CaseStatus::Retained, "retained"},
}};

bool in_unit_interval(double v) noexcept { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

std::string_view to_string(EvidenceKind kind) noexcept {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "other";
}

std::optional<EvidenceKind> parse_evidence_kind(std::string_view name) noexcept {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

std::string_view to_string(CaseStatus status) noexcept {
    for (const auto& [s, name] : kStatusNames) {
        if (s == status) return name;
    }
    return "proposed";
}

std::optional<CaseStatus> parse_case_status(std::string_view name) noexcept {
    for (const auto& [s, n] : kStatusNames) {
        if (n == name) return s;
    }
    return std::nullopt;
}

const Evidence* Attack::find_evidence(std::string_view evidence_id) const noexcept {
    auto it = std::find_if(evidence.begin(), evidence.end(),
                           [&](const Evidence& e) { return e.id == evidence_id; });
    return it == evidence.end() ? nullptr : &*it;
}

double CausalNetwork::likelihood(std::string_view evidence_id, std::string_view intention_id) const {
    auto row = likelihoods.find(std::string(evidence_id));
    if (row == likelihoods.end()) {
        throw Error(ErrorCode::UnknownEvidence,
                    "evidence '" + std::string(evidence_id) + "' is not in the causal network");
    }
    auto cell = row->second.find(std::string(intention_id));
    if (cell == row->second.end()) {
        throw Error(ErrorCode::UnknownIntention,
                    "intention '" + std::string(intention_id) + "' has no likelihood for evidence '" +
                        std::string(evidence_id) + "'");
    }
    return cell->second;
}

bool CausalNetwork::has_evidence(std::string_view evidence_id) const noexcept {
    return std::find(evidence_ids.begin(), evidence_ids.end(), evidence_id) != evidence_ids.end();
}

const Intention* CausalNetwork::find_intention(std::string_view intention_id) const noexcept {
    auto it = std::find_if(intentions.begin(), intentions.end(),
                           [&](const Intention& i) { return i.id == intention_id; });
    return it == intentions.end() ? nullptr : &*it;
}

bool is_safe_identifier(std::string_view id) noexcept {
    if (id.empty() || id.front() == '.' || id.size() > 200) return false;
    return std::all_of(id.begin(), id.end(), [](char ch) {
        return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
               ch == '-' || ch == '_' || ch == '.';
    });
}

std::vector<Violation> validate_attack(const Attack& attack) {
    std::vector<Violation> out;
    if (attack.id.empty()) out.push_back({"attack.id", "must be non-empty"});
    if (!in_unit_interval(attack.detection_state)) {
        out.push_back({"attack.detection_state", "confidence-range: must lie in [0,1]"});
    }
    std::set<std::string> seen;
    for (const auto& ev : attack.evidence) {
        const std::string field = "attack.evidence[" + ev.id + "]";
        if (ev.id.empty()) out.push_back({"attack.evidence.id", "must be non-empty"});
        if (!seen.insert(ev.id).second) out.push_back({field, "duplicate evidence id"});
        if (!in_unit_interval(ev.confidence)) {
            out.push_back({field + ".confidence", "confidence-range: must lie in [0,1]"});
        }
    }
    return out;
}

double weight_sum(const Case& c) {
    double sum = 0.0;
    for (const auto& ev : c.attack.evidence) {
        if (auto it = c.evidence_weights.find(ev.id); it != c.evidence_weights.end()) sum += it->second;
    }
    return sum;
}

std::vector<Violation> validate_case(const Case& c) {
    std::vector<Violation> out;
    if (!is_safe_identifier(c.case_id)) {
        out.push_back({"case_id", "must be non-empty and use only [A-Za-z0-9._-]"});
    }
    auto attack_violations = validate_attack(c.attack);
    out.insert(out.end(), attack_violations.begin(), attack_violations.end());

    if (c.intention) {
        if (c.intention->id.empty()) out.push_back({"intention.id", "must be non-empty"});
        if (c.intention->label.empty()) out.push_back({"intention.label", "must be non-empty"});
    } else if (is_confirmed(c.status)) {
        out.push_back({"intention", "required for precedent and retained cases"});
    }

    for (const auto& [id, w] : c.evidence_weights) {
        if (!std::isfinite(w) || w < 0.0) {
            out.push_back({"evidence_weights[" + id + "]", "weight must be >= 0"});
        }
        if (!c.attack.find_evidence(id)) {
            out.push_back({"evidence_weights[" + id + "]", "weight refers to unknown evidence"});
        }
    }
    if (is_confirmed(c.status)) {
        const double sum = weight_sum(c);
        if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
            std::ostringstream msg;
            msg << "weight-sum: weights must sum to 1 for " << to_string(c.status) << " cases (got "
                << sum << ")";
            out.push_back({"evidence_weights", msg.str()});
        }
    }
    return out;
}

std::vector<Violation> validate_network(const CausalNetwork& network) {
    std::vector<Violation> out;
    if (network.intentions.empty()) out.push_back({"intentions", "must be non-empty"});
    std::set<std::string> intention_ids;
    for (const auto& i : network.intentions) {
        if (i.id.empty()) out.push_back({"intentions.id", "must be non-empty"});
        if (i.label.empty()) out.push_back({"intentions[" + i.id + "].label", "must be non-empty"});
        if (!intention_ids.insert(i.id).second) {
            out.push_back({"intentions[" + i.id + "]", "duplicate intention id"});
        }
    }

    double prior_sum = 0.0;
    for (const auto& id : intention_ids) {
        auto it = network.priors.find(id);
        if (it == network.priors.end()) {
            out.push_back({"priors[" + id + "]", "missing prior"});
            continue;
        }
        if (!std::isfinite(it->second) || it->second < 0.0) {
            out.push_back({"priors[" + id + "]", "prior must be >= 0"});
        }
        prior_sum += it->second;
    }
    for (const auto& [id, p] : network.priors) {
        if (!intention_ids.count(id)) out.push_back({"priors[" + id + "]", "prior for unknown intention"});
    }
    if (!(std::abs(prior_sum - 1.0) <= kProbabilityTolerance)) {
        out.push_back({"priors", "priors must sum to 1"});
    }

    std::set<std::string> evidence_seen;
    for (const auto& ev : network.evidence_ids) {
        if (!evidence_seen.insert(ev).second) {
            out.push_back({"evidence_ids[" + ev + "]", "duplicate evidence id"});
        }
        auto row = network.likelihoods.find(ev);
        if (row == network.likelihoods.end()) {
            out.push_back({"likelihoods[" + ev + "]", "missing likelihood row"});
            continue;
        }
        for (const auto& id : intention_ids) {
            auto cell = row->second.find(id);
            if (cell == row->second.end()) {
                out.push_back({"likelihoods[" + ev + "][" + id + "]", "missing likelihood"});
            } else if (!in_unit_interval(cell->second)) {
                out.push_back({"likelihoods[" + ev + "][" + id + "]", "likelihood must lie in [0,1]"});
            }
        }
    }
    for (const auto& [ev, row] : network.likelihoods) {
        if (!evidence_seen.count(ev)) {
            out.push_back({"likelihoods[" + ev + "]", "row for undeclared evidence"});
        }
    }
    return out;
}

std::string describe(const std::vector<Violation>& violations) {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.field + ": " + v.rule;
    }
    return out;
}

bool is_legal_transition(CaseStatus from, CaseStatus to) noexcept {
    switch (from) {
        case CaseStatus::Proposed: return to == CaseStatus::Incipient;
        case CaseStatus::Incipient:
            return to == CaseStatus::RevisedAccepted || to == CaseStatus::RevisedRejected;
        case CaseStatus::RevisedAccepted: return to == CaseStatus::Retained;
        case CaseStatus::Precedent:
        case CaseStatus::RevisedRejected:
        case CaseStatus::Retained: return false;
    }
    return false;
}

Case transition(const Case& c, CaseStatus target) {
    if (!is_legal_transition(c.status, target)) {
        throw Error(ErrorCode::IllegalTransition, "case '" + c.case_id + "' cannot move from " +
                                                      std::string(to_string(c.status)) + " to " +
                                                      std::string(to_string(target)));
    }
    Case next = c;
    next.status = target;
    return next;
}

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        char* end = nullptr;
        long long value = std::strtoll(epoch, &end, 10);
        if (end && *end == '\0' && value >= 0) now = static_cast<std::time_t>(value);
    }
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace intent_cbr
