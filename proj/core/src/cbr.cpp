#include "intent_cbr/cbr.hpp"

#include "intent_cbr/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

namespace intent_cbr::cbr {

namespace {

std::string format_real(double v, const char* fmt = "%.12g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
    std::string out = "\"";
    for (char ch : value) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

void append_line(std::string& provenance, const std::string& line) {
    if (!provenance.empty() && provenance.back() != '\n') provenance += '\n';
    provenance += line;
}

}  // namespace

double local_similarity(const Evidence& new_evidence, const Evidence& precedent_evidence) {
    if (new_evidence.kind != precedent_evidence.kind) return 0.0;
    const auto& a = new_evidence.attributes;
    const auto& b = precedent_evidence.attributes;
    if (a.empty() && b.empty()) return 1.0;

    // Both maps are key-sorted, so a merge walk counts shared key=value pairs.
    std::size_t shared = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            if (ia->second == ib->second) ++shared;
            ++ia;
            ++ib;
        }
    }
    const std::size_t union_size = a.size() + b.size() - shared;
    const double jaccard = static_cast<double>(shared) / static_cast<double>(union_size);
    return 0.5 + 0.5 * jaccard;
}

std::vector<AlignedPair> greedy_align(const SimilarityMatrix& matrix) {
    struct Candidate {
        double sim;
        std::size_t row;
        std::size_t col;
    };
    std::vector<Candidate> candidates;
    for (std::size_t r = 0; r < matrix.new_ids.size(); ++r) {
        for (std::size_t c = 0; c < matrix.precedent_ids.size(); ++c) {
            const double s = matrix.values[r][c];
            if (s > 0.0) candidates.push_back({s, r, c});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& x, const Candidate& y) {
        if (x.sim != y.sim) return x.sim > y.sim;
        return std::tie(matrix.new_ids[x.row], matrix.precedent_ids[x.col]) <
               std::tie(matrix.new_ids[y.row], matrix.precedent_ids[y.col]);
    });

    std::vector<bool> row_used(matrix.new_ids.size(), false);
    std::vector<bool> col_used(matrix.precedent_ids.size(), false);
    std::vector<AlignedPair> out;
    for (const auto& cand : candidates) {
        if (row_used[cand.row] || col_used[cand.col]) continue;
        row_used[cand.row] = true;
        col_used[cand.col] = true;
        out.push_back({matrix.new_ids[cand.row], matrix.precedent_ids[cand.col], cand.sim});
    }
    return out;
}

std::vector<AlignedPair> align_evidence(const Case& new_case, const Case& precedent) {
    SimilarityMatrix matrix;
    for (const auto& ev : new_case.attack.evidence) matrix.new_ids.push_back(ev.id);
    for (const auto& ev : precedent.attack.evidence) matrix.precedent_ids.push_back(ev.id);
    matrix.values.reserve(new_case.attack.evidence.size());
    for (const auto& n : new_case.attack.evidence) {
        auto& row = matrix.values.emplace_back();
        row.reserve(precedent.attack.evidence.size());
        for (const auto& p : precedent.attack.evidence) row.push_back(local_similarity(n, p));
    }
    return greedy_align(matrix);
}

double score_alignment(std::span<const AlignedPair> alignment, const Case& precedent) {
    double score = 0.0;
    for (const auto& pair : alignment) {
        auto w = precedent.evidence_weights.find(pair.precedent_evidence_id);
        if (w != precedent.evidence_weights.end()) score += pair.local_sim * w->second;
    }
    return score;
}

SimilarityResult similarity(const Case& new_case, const Case& precedent) {
    const double total_weight = weight_sum(precedent);
    if (!(std::abs(total_weight - 1.0) <= kProbabilityTolerance)) {
        throw Error(ErrorCode::UnnormalizedWeights, "precedent '" + precedent.case_id + "' weights sum to " +
                                                        format_real(total_weight));
    }
    SimilarityResult result{new_case.case_id, precedent.case_id, align_evidence(new_case, precedent), 0.0};
    result.score = score_alignment(result.alignment, precedent);
    return result;
}

RetrievalRanking retrieve(const Case& new_case, std::span<const Case> candidates, std::size_t k) {
    if (k == 0) throw Error(ErrorCode::ValidationFailure, "k must be positive");
    RetrievalRanking ranking{new_case.case_id, {}, {}};
    for (const auto& precedent : candidates) {
        if (!is_confirmed(precedent.status)) continue;
        ranking.entries.push_back(similarity(new_case, precedent));
        if (precedent.intention) ranking.intentions.emplace(precedent.case_id, *precedent.intention);
    }
    if (ranking.entries.empty()) {
        throw Error(ErrorCode::EmptyRepository, "no precedent or retained cases to compare against");
    }
    std::sort(ranking.entries.begin(), ranking.entries.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.precedent_case_id < b.precedent_case_id;
    });
    if (ranking.entries.size() > k) ranking.entries.resize(k);

    std::set<std::string> kept;
    for (const auto& e : ranking.entries) kept.insert(e.precedent_case_id);
    std::erase_if(ranking.intentions, [&](const auto& kv) { return !kept.count(kv.first); });
    return ranking;
}

RetrievalRanking retrieve(const Case& new_case, const RepositoryHandle& repository, std::size_t k) {
    const auto candidates = repository.confirmed_cases();
    return retrieve(new_case, std::span<const Case>(candidates), k);
}

Case case_from_attack(const Attack& attack, std::string case_id) {
    Case c;
    c.case_id = std::move(case_id);
    c.attack = attack;
    c.status = CaseStatus::Proposed;
    c.provenance = "analyst";
    c.created_at = utc_timestamp();
    return c;
}

Case reuse(const Case& new_case, const RetrievalRanking& ranking) {
    if (ranking.entries.empty()) throw Error(ErrorCode::EmptyRanking, "nothing was retrieved to reuse");
    const auto& top = ranking.entries.front();
    auto intention = ranking.intentions.find(top.precedent_case_id);
    if (intention == ranking.intentions.end()) {
        throw Error(ErrorCode::ValidationFailure, "precedent '" + top.precedent_case_id + "' has no intention");
    }
    Case proposed = new_case;
    proposed.intention = intention->second;
    proposed.status = CaseStatus::Proposed;
    std::string line = "reuse: precedent=" + top.precedent_case_id + " score=" + format_real(top.score);
    if (top.score < kLowConfidenceScore) line += " low-confidence";
    append_line(proposed.provenance, line);
    return proposed;
}

std::optional<double> proposal_score(const Case& c) {
    std::istringstream lines(c.provenance);
    std::string line;
    std::optional<double> score;
    while (std::getline(lines, line)) {
        if (line.rfind("reuse: ", 0) != 0) continue;
        const auto pos = line.find(" score=");
        if (pos == std::string::npos) continue;
        try {
            score = std::stod(line.substr(pos + 7));
        } catch (const std::exception&) {
            // malformed audit line; keep looking
        }
    }
    return score;
}

Case initialize_incipient(const Case& proposed) {
    Case incipient = transition(proposed, CaseStatus::Incipient);

    double total = 0.0;
    for (const auto& ev : incipient.attack.evidence) total += ev.confidence;
    incipient.evidence_weights.clear();
    for (const auto& ev : incipient.attack.evidence) {
        // All-zero confidences carry no preference; fall back to equal weights.
        incipient.evidence_weights[ev.id] =
            total > 0.0 ? ev.confidence / total : 1.0 / static_cast<double>(incipient.attack.evidence.size());
    }

    std::ostringstream doc;
    doc << "incipient: attack " << incipient.attack.id << " (" << incipient.attack.name << ")\n";
    if (incipient.intention) {
        doc << "  intention: " << incipient.intention->label << " [" << incipient.intention->id << "]\n";
    }
    if (auto score = proposal_score(proposed)) doc << "  supporting score: " << format_real(*score, "%.4f") << "\n";
    doc << "  evidence:";
    for (const auto& ev : incipient.attack.evidence) {
        doc << "\n    - " << ev.id << " [" << to_string(ev.kind)
            << "] weight=" << format_real(incipient.evidence_weights[ev.id], "%.4f");
        if (!ev.description.empty()) doc << " " << ev.description;
    }
    append_line(incipient.provenance, doc.str());
    return incipient;
}

Case revise(const Case& incipient, const ReviseVerdict& verdict) {
    if (verdict.verdict == Verdict::Reject && verdict.rationale.empty()) {
        throw Error(ErrorCode::ValidationFailure, "a reject verdict needs a rationale");
    }
    const bool accepted = verdict.verdict == Verdict::Accept;
    Case revised = transition(incipient, accepted ? CaseStatus::RevisedAccepted : CaseStatus::RevisedRejected);
    std::string line = std::string("revise: verdict=") + (accepted ? "accept" : "reject");
    if (!verdict.crime_type.empty()) line += " crime_type=" + verdict.crime_type;
    if (!verdict.damage_note.empty()) line += " damage_note=" + verdict.damage_note;
    if (!verdict.rationale.empty()) line += " rationale=" + verdict.rationale;
    append_line(revised.provenance, line);
    return revised;
}

Case retain(const Case& accepted, RepositoryHandle& repository) {
    Case retained = transition(accepted, CaseStatus::Retained);
    const double total = weight_sum(retained);
    if (!(std::abs(total - 1.0) <= kProbabilityTolerance)) {
        throw Error(ErrorCode::UnnormalizedWeights, "case '" + retained.case_id + "' weights sum to " +
                                                        format_real(total));
    }
    append_line(retained.provenance, "retain: " + utc_timestamp());
    if (repository.contains_case(retained.case_id)) {
        if (is_confirmed(repository.get_case(retained.case_id).status)) {
            throw Error(ErrorCode::DuplicateCaseId, "case '" + retained.case_id + "' is already a precedent");
        }
        repository.update_case(retained);
    } else {
        repository.add_case(retained);
    }
    return repository.get_case(retained.case_id);
}

std::string ranking_csv(const RetrievalRanking& ranking, int decimals) {
    const std::string fmt = "%." + std::to_string(decimals) + "f";
    std::string out = "rank,precedent_case_id,intention_label,score\n";
    std::size_t rank = 1;
    for (const auto& entry : ranking.entries) {
        auto intention = ranking.intentions.find(entry.precedent_case_id);
        const std::string label = intention == ranking.intentions.end() ? "" : intention->second.label;
        out += std::to_string(rank++) + "," + csv_field(entry.precedent_case_id) + "," + csv_field(label) + "," +
               format_real(entry.score, fmt.c_str()) + "\n";
    }
    return out;
}

}  // namespace intent_cbr::cbr
