#pragma once

#include "intent_cbr/mass_function.hpp"
#include "intent_cbr/model.hpp"

#include <map>
#include <span>
#include <string>
#include <string_view>

namespace intent_cbr::aia {

/// P(EV) = sum over intentions of P(EV | I) * P(I). Throws UnknownEvidence.
double evidence_marginal(const CausalNetwork& network, std::string_view evidence_id);

/// P(I | EV) by Bayes. Throws ZeroMarginal when P(EV) is 0.
double posterior(const CausalNetwork& network, std::string_view intention_id, std::string_view evidence_id);

/// Posterior of every intention in the network for one evidence item.
std::map<std::string, double> posteriors(const CausalNetwork& network, std::string_view evidence_id);

/// Normalised posteriors discounted by the hypothesis accuracy; the residual
/// 1 - accuracy goes to the whole frame.
MassFunction build_mass_function(const std::map<std::string, double>& posteriors, const Hypothesis& hypothesis);

/// Per-intention discounting: m({i}) = accuracy[i] * p_i / sum(p), rest on
/// the frame. Every posterior key needs an accuracy.
MassFunction build_mass_function(const std::map<std::string, double>& posteriors,
                                 const std::map<std::string, double>& accuracy);

struct BeliefInterval {
    double belief = 0.0;
    double plausibility = 0.0;
};

struct BeliefReport {
    std::map<std::string, BeliefInterval> per_intention;
    std::string selected;
    MassFunction mass;
};

/// Argmax of belief; ties go to the lexicographically smallest id.
std::string select_max_belief(const std::map<std::string, BeliefInterval>& per_intention);

/// Resolves the accuracy that applies to each intention: an exact
/// `applies_to` match wins over the "*" wildcard. An empty hypothesis list
/// falls back to the attack's detection_state. Throws NoHypothesis.
std::map<std::string, double> resolve_accuracies(const Attack& attack, const CausalNetwork& network,
                                                 std::span<const Hypothesis> hypotheses);

/// Fuses one discounted mass function per evidence item with Dempster's rule
/// and picks the intention with the highest belief.
BeliefReport run_aia(const Attack& attack, const CausalNetwork& network, std::span<const Hypothesis> hypotheses);

/// Same network with P(I) = 1/|I|.
CausalNetwork with_uniform_priors(CausalNetwork network);

/// Same network with priors taken from `weights`, restricted to the network's
/// intentions and renormalised. Throws EmptyRepository if nothing overlaps.
CausalNetwork with_priors(CausalNetwork network, const std::map<std::string, double>& weights);

}  // namespace intent_cbr::aia
