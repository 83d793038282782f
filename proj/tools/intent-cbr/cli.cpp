#include "cli.hpp"

#include "intent_cbr/aia.hpp"
#include "intent_cbr/cbr.hpp"
#include "intent_cbr/codec.hpp"
#include "intent_cbr/ingest.hpp"
#include "intent_cbr/repository.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;

namespace intent_cbr::cli {

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::IoFailure: return kIoFailure;
        case ErrorCode::EmptyRepository:
        case ErrorCode::EmptyRanking: return kEmptyRepository;
        case ErrorCode::ZeroMarginal:
        case ErrorCode::TotalConflict:
        case ErrorCode::EmptyPosteriors:
        case ErrorCode::AllZeroPosteriors: return kAnalysisFailure;
        default: return kValidation;
    }
}

namespace {

constexpr const char* kRepoEnv = "INTENT_CBR_REPO";

struct IngestOptions {
    std::string input;
    std::string format;
    std::string repo;
    std::string attack_id;
};

struct AnalyzeOptions {
    std::string repo;
    std::string attack_id;
    std::size_t top = 3;
    bool interactive = false;
};

struct ReviseOptions {
    std::string repo;
    std::string case_id;
    std::string verdict;
    std::string rationale;
    std::string crime_type;
    std::string damage_note;
};

struct RetainOptions {
    std::string repo;
    std::string case_id;
};

struct SeedOptions {
    std::string repo;
    std::string network;
    std::string attack;
    std::string priors;
    std::string hypotheses;
};

struct ReportOptions {
    std::string repo;
    std::string attack_id;
    std::string out;
    std::string chart_data;
};

std::string fixed(double v, int decimals) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

/// The first case id for this attack that is free or still in flight, so
/// re-analysis overwrites a pending incipient case but never a decided one.
std::string analysis_case_id(const RepositoryHandle& repo, const std::string& attack_id) {
    const std::string base = "ncai-" + attack_id;
    for (int n = 1;; ++n) {
        const std::string id = n == 1 ? base : base + "-" + std::to_string(n);
        if (!repo.contains_case(id)) return id;
        const auto status = repo.get_case(id).status;
        if (status == CaseStatus::Proposed || status == CaseStatus::Incipient) return id;
    }
}

void store(RepositoryHandle& repo, const Case& c) {
    if (repo.contains_case(c.case_id)) {
        repo.update_case(c);
    } else {
        repo.add_case(c);
    }
}

void print_ranking(std::ostream& out, const cbr::RetrievalRanking& ranking) {
    out << "rank  score           precedent_case_id  intention\n";
    std::size_t rank = 1;
    for (const auto& entry : ranking.entries) {
        auto it = ranking.intentions.find(entry.precedent_case_id);
        char head[64];
        std::snprintf(head, sizeof head, "%-5zu %-15s ", rank++, fixed(entry.score, 12).c_str());
        out << head << entry.precedent_case_id;
        const std::size_t width = entry.precedent_case_id.size();
        out << std::string(width < 19 ? 19 - width : 1, ' ')
            << (it == ranking.intentions.end() ? std::string() : it->second.label) << "\n";
    }
}

std::optional<std::string> prompt(std::istream& in, std::ostream& err, const std::string& question) {
    err << question << std::flush;
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

int cmd_ingest(const IngestOptions& opt, std::ostream& out, std::ostream& err) {
    const fs::path input(opt.input);
    const auto format = opt.format.empty() ? ingest::format_from_path(input)
                        : opt.format == "csv" ? ingest::Format::Csv
                                              : ingest::Format::Json;
    auto result = ingest::parse_evidence_file(input, format);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    if (!opt.attack_id.empty()) {
        if (result.attack.name == result.attack.id) result.attack.name = opt.attack_id;
        result.attack.id = opt.attack_id;
    }
    auto repo = RepositoryHandle::open(opt.repo);
    repo.add_attack(result.attack);
    out << result.attack.evidence.size() << " evidence items ingested as attack '" << result.attack.id << "'\n";
    return kOk;
}

int cmd_analyze(const AnalyzeOptions& opt, std::istream& in, std::ostream& out, std::ostream& err) {
    auto repo = RepositoryHandle::open(opt.repo);
    if (repo.confirmed_count() == 0) {
        throw Error(ErrorCode::EmptyRepository, "repository " + opt.repo + " holds no precedent or retained cases");
    }
    const Attack attack = repo.get_attack(opt.attack_id);
    const Case fresh = cbr::case_from_attack(attack, analysis_case_id(repo, attack.id));

    const auto ranking = cbr::retrieve(fresh, repo, opt.top);
    print_ranking(out, ranking);
    const Case incipient = cbr::initialize_incipient(cbr::reuse(fresh, ranking));
    out << "proposed intention: " << incipient.intention->label << " [" << incipient.intention->id << "]\n";
    if (auto score = cbr::proposal_score(incipient); score && *score < cbr::kLowConfidenceScore) {
        err << "warning: low-confidence proposal (score " << fixed(*score, 4) << ")\n";
    }
    store(repo, incipient);

    if (!opt.interactive) {
        out << "incipient case '" << incipient.case_id << "' written; decide it with `intent-cbr revise --case-id "
            << incipient.case_id << " --verdict accept|reject`\n";
        return kOk;
    }

    const auto answer = prompt(in, err, "verdict for '" + incipient.intention->label + "' [accept/reject]: ");
    if (!answer || (*answer != "accept" && *answer != "reject" && *answer != "a" && *answer != "r")) {
        err << "error: expected 'accept' or 'reject'; case '" << incipient.case_id << "' left incipient\n";
        return kValidation;
    }
    cbr::ReviseVerdict verdict;
    verdict.verdict = (*answer == "accept" || *answer == "a") ? cbr::Verdict::Accept : cbr::Verdict::Reject;
    verdict.crime_type = prompt(in, err, "crime type: ").value_or("");
    verdict.damage_note = prompt(in, err, "damage note: ").value_or("");
    verdict.rationale = prompt(in, err, "rationale: ").value_or("");

    const Case revised = cbr::revise(incipient, verdict);
    store(repo, revised);
    if (verdict.verdict == cbr::Verdict::Reject) {
        out << "case '" << revised.case_id << "' rejected\n";
        return kOk;
    }
    const Case retained = cbr::retain(revised, repo);
    out << "case '" << retained.case_id << "' retained; " << repo.confirmed_count() << " precedents in repository\n";
    return kOk;
}

int cmd_revise(const ReviseOptions& opt, std::ostream& out) {
    cbr::ReviseVerdict verdict;
    verdict.verdict = opt.verdict == "accept" ? cbr::Verdict::Accept : cbr::Verdict::Reject;
    verdict.rationale = opt.rationale;
    verdict.crime_type = opt.crime_type;
    verdict.damage_note = opt.damage_note;
    if (verdict.verdict == cbr::Verdict::Reject && verdict.rationale.empty()) {
        throw Error(ErrorCode::ValidationFailure, "--rationale is required with --verdict reject");
    }
    auto repo = RepositoryHandle::open(opt.repo);
    const Case revised = cbr::revise(repo.get_case(opt.case_id), verdict);
    repo.update_case(revised);
    out << "case '" << revised.case_id << "' is now " << to_string(revised.status) << "\n";
    return kOk;
}

int cmd_retain(const RetainOptions& opt, std::ostream& out) {
    auto repo = RepositoryHandle::open(opt.repo);
    const Case retained = cbr::retain(repo.get_case(opt.case_id), repo);
    out << "case '" << retained.case_id << "' retained; " << repo.confirmed_count() << " precedents in repository\n";
    return kOk;
}

int cmd_seed_aia(const SeedOptions& opt, std::ostream& out, std::ostream& err) {
    const fs::path attack_path(opt.attack);
    auto parsed = ingest::parse_evidence_file(attack_path, ingest::format_from_path(attack_path));
    for (const auto& w : parsed.warnings) err << "warning: " << w << "\n";
    const Attack& attack = parsed.attack;

    auto network = decode<CausalNetwork>(parse_json(read_text(opt.network), opt.network), opt.network);
    if (network.attack_id != attack.id) {
        throw Error(ErrorCode::ValidationFailure, "network is for attack '" + network.attack_id +
                                                      "' but the evidence file describes '" + attack.id + "'");
    }
    std::vector<Hypothesis> hypotheses;
    if (!opt.hypotheses.empty()) {
        hypotheses = decode<std::vector<Hypothesis>>(parse_json(read_text(opt.hypotheses), opt.hypotheses),
                                                     opt.hypotheses);
    }

    auto repo = RepositoryHandle::open(opt.repo);
    if (opt.priors == "frequency") {
        network = aia::with_priors(std::move(network), repo.intention_frequencies());
    } else if (opt.priors == "uniform" || network.priors.empty()) {
        network = aia::with_uniform_priors(std::move(network));
    }

    const auto report = aia::run_aia(attack, network, hypotheses);
    const Intention* selected = network.find_intention(report.selected);

    Case seeded;
    seeded.case_id = "aia-" + attack.id;
    seeded.attack = attack;
    seeded.intention = *selected;
    seeded.status = CaseStatus::Precedent;
    seeded.created_at = utc_timestamp();
    double total = 0.0;
    for (const auto& ev : attack.evidence) total += ev.confidence;
    for (const auto& ev : attack.evidence) {
        seeded.evidence_weights[ev.id] =
            total > 0.0 ? ev.confidence / total : 1.0 / static_cast<double>(attack.evidence.size());
    }
    const auto& chosen = report.per_intention.at(report.selected);
    seeded.provenance = "seeded-by-AIA\naia: selected=" + report.selected + " belief=" + fixed(chosen.belief, 6) +
                        " plausibility=" + fixed(chosen.plausibility, 6);

    repo.put_network(network);
    repo.add_case(seeded);

    out << "intention    belief    plausibility\n";
    for (const auto& [id, interval] : report.per_intention) {
        char line[128];
        std::snprintf(line, sizeof line, "%-12s %-9s %s\n", id.c_str(), fixed(interval.belief, 6).c_str(),
                      fixed(interval.plausibility, 6).c_str());
        out << line;
    }
    out << "selected: " << selected->label << " [" << selected->id << "]\n";
    out << "seeded precedent '" << seeded.case_id << "'\n";
    return kOk;
}

int cmd_report(const ReportOptions& opt, std::ostream& out) {
    auto repo = RepositoryHandle::open(opt.repo);
    if (repo.confirmed_count() == 0) {
        throw Error(ErrorCode::EmptyRepository, "repository " + opt.repo + " holds no precedent or retained cases");
    }
    const Attack attack = repo.get_attack(opt.attack_id);
    const Case fresh = cbr::case_from_attack(attack, "ncai-" + attack.id);
    const auto ranking = cbr::retrieve(fresh, repo, std::max<std::size_t>(repo.confirmed_count(), 1));

    write_text(opt.out, cbr::ranking_csv(ranking, 2));
    if (!opt.chart_data.empty()) {
        Json rows = Json::array();
        for (const auto& entry : ranking.entries) {
            auto it = ranking.intentions.find(entry.precedent_case_id);
            rows.push_back(Json{{"label", it == ranking.intentions.end() ? std::string() : it->second.label},
                                {"score", entry.score}});
        }
        write_text(opt.chart_data, rows.dump(2) + "\n");
    }
    out << ranking.entries.size() << " rows written to " << opt.out << "\n";
    return kOk;
}

CLI::Option* add_repo_option(CLI::App* cmd, std::string& target) {
    return cmd->add_option("--repo", target, "Repository directory (default: $INTENT_CBR_REPO)")
        ->envname(kRepoEnv)
        ->required();
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Case-based analysis of cyber-attack intentions", "intent-cbr"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "intent-cbr 0.1.0");

    IngestOptions ingest_opt;
    auto* ingest_cmd = app.add_subcommand("ingest", "Parse an evidence file and store it as an attack");
    ingest_cmd->add_option("--input", ingest_opt.input, "Evidence file")->required();
    ingest_cmd->add_option("--format", ingest_opt.format, "json or csv (default: from the extension)")
        ->check(CLI::IsMember({"json", "csv"}));
    add_repo_option(ingest_cmd, ingest_opt.repo);
    ingest_cmd->add_option("--attack-id", ingest_opt.attack_id,
                           "Attack id (default: the JSON attack id or the CSV file stem)");
    ingest_cmd->footer("Evidence rows without a confidence value are taken as confidence 1.0.");

    AnalyzeOptions analyze_opt;
    auto* analyze_cmd = app.add_subcommand("analyze", "Retrieve precedents and propose an intention");
    add_repo_option(analyze_cmd, analyze_opt.repo);
    analyze_cmd->add_option("--attack-id", analyze_opt.attack_id, "Ingested attack to analyse")->required();
    analyze_cmd->add_option("--top", analyze_opt.top, "Number of precedents to rank")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    analyze_cmd->add_flag("--interactive", analyze_opt.interactive, "Prompt for the revise verdict and retain on accept");

    ReviseOptions revise_opt;
    auto* revise_cmd = app.add_subcommand("revise", "Record an investigator verdict on an incipient case");
    add_repo_option(revise_cmd, revise_opt.repo);
    revise_cmd->add_option("--case-id", revise_opt.case_id, "Incipient case")->required();
    revise_cmd->add_option("--verdict", revise_opt.verdict, "accept or reject")
        ->required()
        ->check(CLI::IsMember({"accept", "reject"}));
    revise_cmd->add_option("--rationale", revise_opt.rationale, "Reason for the verdict (required on reject)");
    revise_cmd->add_option("--crime-type", revise_opt.crime_type, "Type of crime the case was judged against");
    revise_cmd->add_option("--damage-note", revise_opt.damage_note, "Damage resulting from the attack");

    RetainOptions retain_opt;
    auto* retain_cmd = app.add_subcommand("retain", "Store an accepted case as a precedent");
    add_repo_option(retain_cmd, retain_opt.repo);
    retain_cmd->add_option("--case-id", retain_opt.case_id, "Revised-accepted case")->required();

    SeedOptions seed_opt;
    auto* seed_cmd = app.add_subcommand("seed-aia", "Seed a precedent with the attack intention algorithm");
    add_repo_option(seed_cmd, seed_opt.repo);
    seed_cmd->add_option("--network", seed_opt.network, "Causal network JSON")->required();
    seed_cmd->add_option("--attack", seed_opt.attack, "Attack evidence file (.json or .csv)")->required();
    seed_cmd->add_option("--priors", seed_opt.priors,
                         "uniform, or frequency of intentions among confirmed cases (default: the network's priors, "
                         "uniform when it has none)")
        ->check(CLI::IsMember({"uniform", "frequency"}));
    seed_cmd->add_option("--hypotheses", seed_opt.hypotheses,
                         "JSON array of hypotheses (default: the attack's detection_state for every intention)");

    ReportOptions report_opt;
    auto* report_cmd = app.add_subcommand("report", "Write the similarity ranking of an attack as CSV");
    add_repo_option(report_cmd, report_opt.repo);
    report_cmd->add_option("--attack-id", report_opt.attack_id, "Ingested attack")->required();
    report_cmd->add_option("--out", report_opt.out, "CSV output path")->required();
    report_cmd->add_option("--chart-data", report_opt.chart_data, "Optional JSON rows {label, score}");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("intent-cbr");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }

    try {
        if (*ingest_cmd) return cmd_ingest(ingest_opt, out, err);
        if (*analyze_cmd) return cmd_analyze(analyze_opt, in, out, err);
        if (*revise_cmd) return cmd_revise(revise_opt, out);
        if (*retain_cmd) return cmd_retain(retain_opt, out);
        if (*seed_cmd) return cmd_seed_aia(seed_opt, out, err);
        if (*report_cmd) return cmd_report(report_opt, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kIoFailure;
    }
    return kValidation;
}

}  // namespace intent_cbr::cli
