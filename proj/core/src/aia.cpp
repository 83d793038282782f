#include "intent_cbr/aia.hpp"

#include "intent_cbr/error.hpp"

#include <algorithm>
#include <vector>

namespace intent_cbr::aia {

double evidence_marginal(const CausalNetwork& network, std::string_view evidence_id) {
    if (!network.has_evidence(evidence_id)) {
        throw Error(ErrorCode::UnknownEvidence,
                    "evidence '" + std::string(evidence_id) + "' is not in the causal network");
    }
    double total = 0.0;
    for (const auto& intention : network.intentions) {
        auto prior = network.priors.find(intention.id);
        const double p = prior == network.priors.end() ? 0.0 : prior->second;
        total += network.likelihood(evidence_id, intention.id) * p;
    }
    return total;
}

double posterior(const CausalNetwork& network, std::string_view intention_id, std::string_view evidence_id) {
    if (!network.find_intention(intention_id)) {
        throw Error(ErrorCode::UnknownIntention,
                    "intention '" + std::string(intention_id) + "' is not in the causal network");
    }
    const double marginal = evidence_marginal(network, evidence_id);
    if (marginal <= 0.0) {
        throw Error(ErrorCode::ZeroMarginal, "evidence '" + std::string(evidence_id) +
                                                 "' is impossible under every intention (P(EV) = 0)");
    }
    auto prior = network.priors.find(std::string(intention_id));
    const double p = prior == network.priors.end() ? 0.0 : prior->second;
    return std::clamp(network.likelihood(evidence_id, intention_id) * p / marginal, 0.0, 1.0);
}

std::map<std::string, double> posteriors(const CausalNetwork& network, std::string_view evidence_id) {
    std::map<std::string, double> out;
    for (const auto& intention : network.intentions) {
        out[intention.id] = posterior(network, intention.id, evidence_id);
    }
    return out;
}

MassFunction build_mass_function(const std::map<std::string, double>& posteriors, const Hypothesis& hypothesis) {
    std::map<std::string, double> accuracy;
    for (const auto& [id, p] : posteriors) accuracy[id] = hypothesis.accuracy;
    return build_mass_function(posteriors, accuracy);
}

MassFunction build_mass_function(const std::map<std::string, double>& posteriors,
                                 const std::map<std::string, double>& accuracy) {
    if (posteriors.empty()) throw Error(ErrorCode::EmptyPosteriors, "no posteriors to build a mass function from");

    double total = 0.0;
    for (const auto& [id, p] : posteriors) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorCode::ValidationFailure, "posterior for '" + id + "' outside [0,1]");
        }
        total += p;
    }
    if (total <= 0.0) throw Error(ErrorCode::AllZeroPosteriors, "every posterior is zero");

    std::vector<std::string> frame;
    frame.reserve(posteriors.size());
    for (const auto& [id, p] : posteriors) frame.push_back(id);

    // Build against a throwaway vacuous function to get the frame's bit layout.
    const MassFunction layout = MassFunction::vacuous(frame);
    std::map<Subset, double> masses;
    double committed = 0.0;
    for (const auto& [id, p] : posteriors) {
        auto acc = accuracy.find(id);
        if (acc == accuracy.end()) throw Error(ErrorCode::NoHypothesis, "no accuracy for intention '" + id + "'");
        if (!(acc->second >= 0.0 && acc->second <= 1.0)) {
            throw Error(ErrorCode::ValidationFailure, "hypothesis accuracy for '" + id + "' outside [0,1]");
        }
        const double m = acc->second * (p / total);
        masses[layout.singleton(id)] += m;
        committed += m;
    }
    const double ignorance = 1.0 - committed;
    if (ignorance > 0.0) masses[layout.full()] += ignorance;
    return MassFunction(std::move(frame), std::move(masses));
}

std::string select_max_belief(const std::map<std::string, BeliefInterval>& per_intention) {
    std::string best;
    double best_belief = -1.0;
    // std::map iterates ids in ascending order, so strict > keeps the smallest id on ties.
    for (const auto& [id, interval] : per_intention) {
        if (interval.belief > best_belief) {
            best = id;
            best_belief = interval.belief;
        }
    }
    return best;
}

std::map<std::string, double> resolve_accuracies(const Attack& attack, const CausalNetwork& network,
                                                 std::span<const Hypothesis> hypotheses) {
    std::map<std::string, double> out;
    for (const auto& intention : network.intentions) {
        if (hypotheses.empty()) {
            out[intention.id] = attack.detection_state;
            continue;
        }
        const Hypothesis* exact = nullptr;
        const Hypothesis* wildcard = nullptr;
        for (const auto& h : hypotheses) {
            if (h.applies_to == intention.id && !exact) exact = &h;
            if (h.applies_to == kAnyIntention && !wildcard) wildcard = &h;
        }
        const Hypothesis* chosen = exact ? exact : wildcard;
        if (!chosen) {
            throw Error(ErrorCode::NoHypothesis, "no hypothesis applies to intention '" + intention.id + "'");
        }
        out[intention.id] = chosen->accuracy;
    }
    return out;
}

BeliefReport run_aia(const Attack& attack, const CausalNetwork& network, std::span<const Hypothesis> hypotheses) {
    if (attack.evidence.empty()) {
        throw Error(ErrorCode::ValidationFailure, "attack '" + attack.id + "' carries no evidence");
    }
    if (auto violations = validate_network(network); !violations.empty()) {
        throw Error(ErrorCode::ValidationFailure, "causal network: " + describe(violations));
    }
    for (const auto& ev : attack.evidence) {
        if (!network.has_evidence(ev.id)) {
            throw Error(ErrorCode::UnknownEvidence, "causal network has no row for evidence '" + ev.id + "'");
        }
    }
    const auto accuracy = resolve_accuracies(attack, network, hypotheses);

    std::vector<std::string> frame;
    for (const auto& intention : network.intentions) frame.push_back(intention.id);
    MassFunction fused = MassFunction::vacuous(frame);
    for (const auto& ev : attack.evidence) {
        fused = combine(fused, build_mass_function(posteriors(network, ev.id), accuracy));
    }

    BeliefReport report{{}, {}, fused};
    for (const auto& id : fused.frame()) {
        const Subset s = fused.singleton(id);
        report.per_intention[id] = {belief(fused, s), plausibility(fused, s)};
    }
    report.selected = select_max_belief(report.per_intention);
    return report;
}

CausalNetwork with_uniform_priors(CausalNetwork network) {
    network.priors.clear();
    const double p = network.intentions.empty() ? 0.0 : 1.0 / static_cast<double>(network.intentions.size());
    for (const auto& intention : network.intentions) network.priors[intention.id] = p;
    return network;
}

CausalNetwork with_priors(CausalNetwork network, const std::map<std::string, double>& weights) {
    double total = 0.0;
    for (const auto& intention : network.intentions) {
        if (auto it = weights.find(intention.id); it != weights.end()) total += it->second;
    }
    if (total <= 0.0) {
        throw Error(ErrorCode::EmptyRepository, "no confirmed case carries any of the network's intentions");
    }
    network.priors.clear();
    for (const auto& intention : network.intentions) {
        auto it = weights.find(intention.id);
        network.priors[intention.id] = it == weights.end() ? 0.0 : it->second / total;
    }
    return network;
}

}  // namespace intent_cbr::aia
