// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero
// if any fails.

#include "cli.hpp"

#include "intent_cbr/aia.hpp"
#include "intent_cbr/cbr.hpp"
#include "intent_cbr/error.hpp"
#include "intent_cbr/mass_function.hpp"
#include "intent_cbr/repository.hpp"

#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace intent_cbr;
namespace ts = test_support;

namespace {

struct Verdict {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult invoke(std::vector<std::string> args) {
    std::istringstream in;
    std::ostringstream out, err;
    const int code = cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const std::string& rel) { return (ts::fixture_dir() / rel).string(); }

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

/// Scores printed by `analyze` in table order: the second column of each row
/// under the header, up to the "proposed intention" line.
std::vector<std::pair<std::string, double>> parse_ranking(const std::string& text) {
    std::vector<std::pair<std::string, double>> rows;
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
        if (line.rfind("proposed intention", 0) == 0) break;
        std::istringstream fields(line);
        std::size_t rank;
        double score;
        std::string id;
        if (fields >> rank >> score >> id) rows.emplace_back(id, score);
    }
    return rows;
}

// 1 ----------------------------------------------------------------------
void fixture_reproduction(Verdict& v) {
    static const std::vector<std::pair<std::string, double>> expected{
        {"pcai-03", 0.91}, {"pcai-01", 0.85}, {"pcai-02", 0.79}, {"pcai-10", 0.71}, {"pcai-04", 0.68}, {"pcai-07", 0.67},
        {"pcai-05", 0.64}, {"pcai-06", 0.62}, {"pcai-08", 0.53}, {"pcai-09", 0.43}, {"pcai-11", 0.38}};
    ts::TempDir dir;
    ts::copy_fixture_repository(dir / "repo");
    const std::string repo = (dir / "repo").string();
    if (invoke({"ingest", "--repo", repo, "--input", fixture("keylogging.csv")}).code != 0) return v.fail("ingest");
    const auto an = invoke({"analyze", "--repo", repo, "--attack-id", "keylogging", "--top", "11"});
    if (an.code != 0) return v.fail("analyze exit " + std::to_string(an.code));

    const auto printed = parse_ranking(an.out);
    if (printed.size() != expected.size()) return v.fail("rows " + std::to_string(printed.size()));
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (printed[i].first != expected[i].first) return v.fail("rank " + std::to_string(i + 1) + " " + printed[i].first);
        if (std::abs(printed[i].second - expected[i].second) > 1e-9) return v.fail("printed score " + printed[i].first);
    }
    // Same check on the unrounded engine values.
    auto handle = RepositoryHandle::open(repo);
    const auto ranking =
        cbr::retrieve(cbr::case_from_attack(handle.get_attack("keylogging"), "probe"), handle, expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (std::abs(ranking.entries[i].score - expected[i].second) > 1e-9) return v.fail("engine score " + expected[i].first);
    }

    const auto rep = invoke({"report", "--repo", repo, "--attack-id", "keylogging", "--out", (dir / "r.csv").string()});
    if (rep.code != 0) return v.fail("report exit " + std::to_string(rep.code));
    if (ts::read_file(dir / "r.csv") != ts::read_file(fixture("golden/keylogging_report.csv"))) {
        return v.fail("report CSV differs from golden");
    }
    v.detail = "11 rows, max |err| <= 1e-9, golden CSV identical";
}

// 2 ----------------------------------------------------------------------
void similarity_oracle(Verdict& v) {
    std::mt19937_64 rng(20190507);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = ts::random_case(rng, "new");
        const auto b = ts::random_case(rng, "prec");
        const auto result = cbr::similarity(a, b);
        double oracle = 0.0;
        std::set<std::string> used_new, used_prec;
        for (const auto& pair : result.alignment) {
            const Evidence* n = a.attack.find_evidence(pair.new_evidence_id);
            const Evidence* p = b.attack.find_evidence(pair.precedent_evidence_id);
            if (!n || !p) return v.fail("alignment names unknown evidence");
            if (!used_new.insert(n->id).second || !used_prec.insert(p->id).second) return v.fail("alignment reuses an id");
            oracle += ts::oracle_local_similarity(*n, *p) * b.evidence_weights.at(p->id);
        }
        worst = std::max(worst, std::abs(result.score - oracle));
    }
    if (worst > 1e-12) return v.fail("max |diff| " + num(worst));
    v.detail = "1000 pairs, max |diff| " + num(worst);
}

// 3 ----------------------------------------------------------------------
void dempster_oracle(Verdict& v) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        const auto frame = ts::make_frame(2 + trial % 3);
        const auto m1 = ts::random_mass(rng, frame);
        const auto m2 = ts::random_mass(rng, frame);
        const auto t1 = ts::to_table(m1);
        const auto t2 = ts::to_table(m2);
        const auto fused = combine(m1, m2);
        if (ts::to_table(fused) != ts::brute_combine(frame, t1, t2)) return v.fail("combine, trial " + std::to_string(trial));
        const auto subsets = ts::all_subsets(frame);
        const std::uint64_t full = (std::uint64_t{1} << frame.size()) - 1;
        for (const auto* m : {&m1, &fused}) {
            const auto t = ts::to_table(*m);
            for (std::uint64_t k = 0; k <= full; ++k) {
                const double bel = belief(*m, Subset(k));
                const double pl = plausibility(*m, Subset(k));
                if (bel != ts::brute_belief(frame, t, subsets[k])) return v.fail("belief, trial " + std::to_string(trial));
                if (pl != ts::brute_plausibility(frame, t, subsets[k])) return v.fail("plausibility, trial " + std::to_string(trial));
                if (bel > pl + 1e-12) return v.fail("Bel > Pl");
                if (std::abs(pl - (1.0 - belief(*m, Subset(full & ~k)))) > 1e-9) return v.fail("Pl != 1 - Bel(complement)");
            }
        }
    }
    v.detail = "500 trials, |frame| in {2,3,4}";
}

// 4 ----------------------------------------------------------------------
void dempster_algebra(Verdict& v) {
    std::mt19937_64 rng(4);
    double worst_comm = 0.0, worst_assoc = 0.0, worst_id = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto frame = ts::make_frame(2 + trial % 3);
        const auto a = ts::random_mass(rng, frame);
        const auto b = ts::random_mass(rng, frame);
        const auto c = ts::random_mass(rng, frame);
        const auto vac = MassFunction::vacuous(frame);
        const auto ab = combine(a, b), ba = combine(b, a);
        const auto l = combine(ab, c), r = combine(a, combine(b, c));
        const auto ia = combine(a, vac), ai = combine(vac, a);
        for (std::uint64_t k = 1; k < (std::uint64_t{1} << frame.size()); ++k) {
            const Subset s(k);
            worst_comm = std::max(worst_comm, std::abs(ab.mass(s) - ba.mass(s)));
            worst_assoc = std::max(worst_assoc, std::abs(l.mass(s) - r.mass(s)));
            worst_id = std::max({worst_id, std::abs(ia.mass(s) - a.mass(s)), std::abs(ai.mass(s) - a.mass(s))});
        }
    }
    if (worst_comm > 1e-9) return v.fail("commutativity " + num(worst_comm));
    if (worst_assoc > 1e-9) return v.fail("associativity " + num(worst_assoc));
    if (worst_id > 1e-12) return v.fail("vacuous identity " + num(worst_id));
    v.detail = "500 triples, comm " + num(worst_comm) + ", assoc " + num(worst_assoc) + ", identity " + num(worst_id);
}

// 5 ----------------------------------------------------------------------
void bayes_normalization(Verdict& v) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> size(2, 6);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        CausalNetwork n;
        n.attack_id = "rand";
        const int ni = size(rng), ne = size(rng);
        double total = 0.0;
        for (int i = 0; i < ni; ++i) {
            const std::string id = "i" + std::to_string(i);
            n.intentions.push_back({id, id, std::nullopt});
            total += n.priors[id] = 0.01 + unit(rng);
        }
        for (auto& [id, p] : n.priors) p /= total;
        for (int e = 0; e < ne; ++e) {
            const std::string ev = "ev" + std::to_string(e);
            n.evidence_ids.push_back(ev);
            for (const auto& in : n.intentions) n.likelihoods[ev][in.id] = unit(rng);
            n.likelihoods[ev]["i0"] = 0.05 + 0.95 * unit(rng);
        }
        for (const auto& ev : n.evidence_ids) {
            double sum = 0.0;
            for (const auto& [id, p] : aia::posteriors(n, ev)) sum += p;
            worst = std::max(worst, std::abs(sum - 1.0));
        }
    }
    if (worst > 1e-9) return v.fail("posterior sum off by " + num(worst));

    CausalNetwork hand;
    hand.attack_id = "hand";
    hand.intentions = {{"i1", "i1", std::nullopt}, {"i2", "i2", std::nullopt}};
    hand.evidence_ids = {"ev01"};
    hand.priors = {{"i1", 0.5}, {"i2", 0.5}};
    hand.likelihoods = {{"ev01", {{"i1", 0.8}, {"i2", 0.4}}}};
    Attack attack{"hand", "hand", 1.0, {{"ev01", EvidenceKind::ToolUsage, {}, "", 1.0}}};
    const auto report = aia::run_aia(attack, hand, {});
    const double bel = report.per_intention.at("i1").belief;
    if (report.selected != "i1") return v.fail("selected " + report.selected);
    if (std::abs(bel - 0.6667) > 1e-4) return v.fail("Bel(i1) = " + num(bel));
    char buf[96];
    std::snprintf(buf, sizeof buf, "200 networks, max |sum-1| %.3g; hand example Bel(i1) = %.6f", worst, bel);
    v.detail = buf;
}

// 6 ----------------------------------------------------------------------
void full_cycle(Verdict& v) {
    ts::TempDir dir;
    ts::copy_fixture_repository(dir / "repo");
    const std::string repo = (dir / "repo").string();
    const std::size_t before = RepositoryHandle::open(repo).confirmed_count();

    if (invoke({"ingest", "--repo", repo, "--input", fixture("keylogging.csv")}).code != 0) return v.fail("ingest");
    if (invoke({"analyze", "--repo", repo, "--attack-id", "keylogging"}).code != 0) return v.fail("analyze");
    if (invoke({"revise", "--repo", repo, "--case-id", "ncai-keylogging", "--verdict", "accept"}).code != 0) {
        return v.fail("revise");
    }
    if (invoke({"retain", "--repo", repo, "--case-id", "ncai-keylogging"}).code != 0) return v.fail("retain");
    if (RepositoryHandle::open(repo).confirmed_count() != before + 1) return v.fail("repository did not grow by one");

    const auto again = invoke({"analyze", "--repo", repo, "--attack-id", "keylogging", "--top", "1"});
    if (again.code != 0) return v.fail("re-analyze");
    const auto rows = parse_ranking(again.out);
    if (rows.empty() || rows[0].first != "ncai-keylogging") return v.fail("retained case not ranked first");

    auto handle = RepositoryHandle::open(repo);
    const auto ranking = cbr::retrieve(cbr::case_from_attack(handle.get_attack("keylogging"), "probe"), handle, 1);
    const double score = ranking.entries[0].score;
    if (ranking.entries[0].precedent_case_id != "ncai-keylogging" || std::abs(score - 1.0) > 1e-12) {
        return v.fail("top score " + num(score));
    }

    const auto snap = ts::snapshot(repo);
    const auto reopened = RepositoryHandle::open(repo);
    if (ts::snapshot(repo) != snap) return v.fail("reopen changed bytes");
    if (reopened.case_count() != handle.case_count()) return v.fail("reopen lost cases");
    v.detail = "retained case rank 1, |score-1| " + num(std::abs(score - 1.0)) + ", reopen byte-identical";
}

// 7 ----------------------------------------------------------------------
void robustness(Verdict& v) {
    ts::TempDir dir;
    const std::string empty = (dir / "empty").string();
    if (invoke({"ingest", "--repo", empty, "--input", fixture("keylogging.csv")}).code != 0) return v.fail("ingest");

    struct Case7 {
        const char* name;
        std::vector<std::string> args;
        int expected;
    };
    ts::copy_fixture_repository(dir / "corrupt");
    ts::write_file(dir / "corrupt/cases/pcai-05.json", "{\"case_id\": ");
    const std::vector<Case7> cases{
        {"empty repository", {"analyze", "--repo", empty, "--attack-id", "keylogging"}, 3},
        {"total conflict",
         {"seed-aia", "--repo", empty, "--network", fixture("aia/conflict_network.json"), "--attack",
          fixture("aia/conflict_attack.json")},
         4},
        {"zero marginal",
         {"seed-aia", "--repo", empty, "--network", fixture("aia/zero_marginal_network.json"), "--attack",
          fixture("aia/zero_marginal_attack.json")},
         4},
        {"corrupt record", {"analyze", "--repo", (dir / "corrupt").string(), "--attack-id", "keylogging"}, 2},
    };
    std::string summary;
    for (const auto& c : cases) {
        const auto r = invoke(c.args);
        if (r.code != c.expected) {
            return v.fail(std::string(c.name) + ": exit " + std::to_string(r.code) + ", expected " +
                          std::to_string(c.expected));
        }
        if (r.err.find("error: ") == std::string::npos) return v.fail(std::string(c.name) + ": no diagnostic");
        summary += std::string(summary.empty() ? "" : ", ") + c.name + "=" + std::to_string(r.code);
    }
    if (RepositoryHandle::open(empty).case_count() != 0) return v.fail("failed seed left a case behind");
    v.detail = summary;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<void(Verdict&)> body;
    };
    const std::vector<Criterion> criteria{
        {1, "fixture ranking reproduction", 1.0, fixture_reproduction},
        {2, "similarity oracle equivalence", 5.0, similarity_oracle},
        {3, "Dempster-Shafer brute-force oracle", 10.0, dempster_oracle},
        {4, "Dempster-Shafer algebra", 0.0, dempster_algebra},
        {5, "Bayes normalisation", 0.0, bayes_normalization},
        {6, "full retrieve-reuse-revise-retain cycle", 0.0, full_cycle},
        {7, "robustness exit codes", 0.0, robustness},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Verdict v;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(v);
        } catch (const std::exception& e) {
            v.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0.0 && secs >= c.budget_s) v.fail("took " + num(secs) + " s, budget " + num(c.budget_s) + " s");
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.3fs", secs);
        std::cout << (v.ok ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << timing << "): " << v.detail
                  << "\n";
        failures += v.ok ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
