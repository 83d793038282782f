#pragma once

#include "intent_cbr/model.hpp"
#include "intent_cbr/repository.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace intent_cbr::cbr {

/// Kind gate plus attribute overlap: 0 when kinds differ, otherwise
/// 0.5 + 0.5 * Jaccard(key=value pairs), with two empty sets counting as 1.
double local_similarity(const Evidence& new_evidence, const Evidence& precedent_evidence);

/// Pairwise local similarities, row = new evidence, column = precedent evidence.
struct SimilarityMatrix {
    std::vector<std::string> new_ids;
    std::vector<std::string> precedent_ids;
    std::vector<std::vector<double>> values;
};

/// Repeatedly takes the best remaining pair with a positive score; ties go to
/// the smallest (new id, precedent id). Each id is used at most once.
std::vector<AlignedPair> greedy_align(const SimilarityMatrix& matrix);

std::vector<AlignedPair> align_evidence(const Case& new_case, const Case& precedent);

/// Sum of local_sim x precedent weight over an alignment; precedent evidence
/// without a weight contributes nothing.
double score_alignment(std::span<const AlignedPair> alignment, const Case& precedent);

/// Weighted sum of local similarities over the alignment, using the
/// precedent's weights. Unmatched precedent evidence contributes nothing.
/// Throws UnnormalizedWeights unless the precedent's weights sum to 1.
SimilarityResult similarity(const Case& new_case, const Case& precedent);

struct RetrievalRanking {
    std::string new_case_id;
    /// Descending score, ties by ascending precedent case id.
    std::vector<SimilarityResult> entries;
    /// Intention of each ranked precedent, keyed by precedent case id.
    std::map<std::string, Intention> intentions;
};

/// Scores the new case against every precedent/retained candidate and keeps
/// the top k. Throws EmptyRepository when there is nothing to compare against.
RetrievalRanking retrieve(const Case& new_case, std::span<const Case> candidates, std::size_t k);
RetrievalRanking retrieve(const Case& new_case, const RepositoryHandle& repository, std::size_t k);

/// Proposals scoring below this are flagged in their provenance.
inline constexpr double kLowConfidenceScore = 0.5;

/// A fresh, not-yet-analysed case wrapping an attack.
Case case_from_attack(const Attack& attack, std::string case_id);

/// Copies the top precedent's intention into the new case (status proposed)
/// and records the precedent id and score. Throws EmptyRanking.
Case reuse(const Case& new_case, const RetrievalRanking& ranking);

/// Score recorded by reuse(), if any.
std::optional<double> proposal_score(const Case& c);

/// proposed -> incipient. Weights become normalised evidence confidences and a
/// readable summary is appended to the provenance.
Case initialize_incipient(const Case& proposed);

enum class Verdict { Accept, Reject };

struct ReviseVerdict {
    Verdict verdict = Verdict::Accept;
    std::string rationale;
    std::string crime_type;
    std::string damage_note;
};

/// incipient -> revised-accepted | revised-rejected, with the verdict kept in
/// the provenance. A reject needs a rationale (ValidationFailure otherwise).
Case revise(const Case& incipient, const ReviseVerdict& verdict);

/// revised-accepted -> retained, stored in the repository (replacing the
/// in-flight copy if one is there). Throws IllegalTransition,
/// UnnormalizedWeights, DuplicateCaseId.
Case retain(const Case& accepted, RepositoryHandle& repository);

/// CSV with header rank,precedent_case_id,intention_label,score. Scores are
/// printed with `decimals` digits after the point.
std::string ranking_csv(const RetrievalRanking& ranking, int decimals = 2);

}  // namespace intent_cbr::cbr
