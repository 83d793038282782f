#include "cli.hpp"

#include "intent_cbr/repository.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <sstream>

using namespace intent_cbr;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args, const std::string& stdin_text = "") {
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    const int code = cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const std::string& rel) { return (test_support::fixture_dir() / rel).string(); }

}  // namespace

TEST_CASE("exit code table") {
    CHECK(cli::exit_code_for(ErrorCode::IoFailure) == 1);
    CHECK(cli::exit_code_for(ErrorCode::MalformedRecord) == 2);
    CHECK(cli::exit_code_for(ErrorCode::CorruptRecord) == 2);
    CHECK(cli::exit_code_for(ErrorCode::EmptyRepository) == 3);
    CHECK(cli::exit_code_for(ErrorCode::EmptyRanking) == 3);
    CHECK(cli::exit_code_for(ErrorCode::ZeroMarginal) == 4);
    CHECK(cli::exit_code_for(ErrorCode::TotalConflict) == 4);
    CHECK(cli::exit_code_for(ErrorCode::AllZeroPosteriors) == 4);
}

TEST_CASE("help and usage errors") {
    CHECK(invoke({"--help"}).code == 0);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"analyze", "--repo", "/tmp/x"}).code == 2);
    CHECK(invoke({"ingest", "--repo", "/tmp/x", "--input", "a.csv", "--format", "xml"}).code == 2);
}

TEST_CASE("ingest then analyze against the fixture repository") {
    test_support::TempDir dir;
    test_support::copy_fixture_repository(dir / "repo");
    const std::string repo = (dir / "repo").string();

    const auto ing = invoke({"ingest", "--repo", repo, "--input", fixture("keylogging.csv")});
    REQUIRE(ing.code == 0);
    CHECK(ing.out == "5 evidence items ingested as attack 'keylogging'\n");
    CHECK(invoke({"ingest", "--repo", repo, "--input", fixture("keylogging.csv")}).code == 2);

    const auto an = invoke({"analyze", "--repo", repo, "--attack-id", "keylogging", "--top", "11"});
    REQUIRE(an.code == 0);
    CHECK(an.out.find("0.910000000000") != std::string::npos);
    CHECK(an.out.find("0.380000000000") != std::string::npos);
    CHECK(an.out.find("pcai-03") < an.out.find("pcai-01"));
    CHECK(an.out.find("proposed intention:") != std::string::npos);

    const auto repo_handle = RepositoryHandle::open(repo);
    CHECK(repo_handle.get_case("ncai-keylogging").status == CaseStatus::Incipient);

    CHECK(invoke({"revise", "--repo", repo, "--case-id", "ncai-keylogging", "--verdict", "reject"}).code == 2);
    CHECK(invoke({"revise", "--repo", repo, "--case-id", "ncai-keylogging", "--verdict", "accept"}).code == 0);
    const auto ret = invoke({"retain", "--repo", repo, "--case-id", "ncai-keylogging"});
    CHECK(ret.code == 0);
    CHECK(ret.out.find("12 precedents") != std::string::npos);
    CHECK(invoke({"retain", "--repo", repo, "--case-id", "ncai-keylogging"}).code == 2);
}

TEST_CASE("interactive analyze retains on accept") {
    test_support::TempDir dir;
    test_support::copy_fixture_repository(dir / "repo");
    const std::string repo = (dir / "repo").string();
    REQUIRE(invoke({"ingest", "--repo", repo, "--input", fixture("keylogging.csv")}).code == 0);

    const auto bad = invoke({"analyze", "--repo", repo, "--attack-id", "keylogging", "--interactive"}, "maybe\n");
    CHECK(bad.code == 2);

    const auto ok = invoke({"analyze", "--repo", repo, "--attack-id", "keylogging", "--interactive"},
                           "accept\nespionage\nkeystrokes leaked\n\n");
    REQUIRE(ok.code == 0);
    CHECK(ok.err.find("crime type:") != std::string::npos);
    CHECK(RepositoryHandle::open(repo).confirmed_count() == 12);

    const auto next = invoke({"analyze", "--repo", repo, "--attack-id", "keylogging"});
    REQUIRE(next.code == 0);
    CHECK(next.out.find("ncai-keylogging") != std::string::npos);
    CHECK(RepositoryHandle::open(repo).contains_case("ncai-keylogging-2"));
}

TEST_CASE("report writes the golden CSV and chart rows") {
    test_support::TempDir dir;
    test_support::copy_fixture_repository(dir / "repo");
    const std::string repo = (dir / "repo").string();
    REQUIRE(invoke({"ingest", "--repo", repo, "--input", fixture("keylogging.csv")}).code == 0);
    const auto r = invoke({"report", "--repo", repo, "--attack-id", "keylogging", "--out", (dir / "r.csv").string(),
                           "--chart-data", (dir / "chart.json").string()});
    REQUIRE(r.code == 0);
    CHECK(test_support::read_file(dir / "r.csv") == test_support::read_file(fixture("golden/keylogging_report.csv")));
    CHECK(test_support::read_file(dir / "chart.json").find("\"score\": 0.91") != std::string::npos);
}

TEST_CASE("error exit codes") {
    test_support::TempDir dir;
    const std::string empty = (dir / "empty").string();
    REQUIRE(invoke({"ingest", "--repo", empty, "--input", fixture("keylogging.csv")}).code == 0);
    CHECK(invoke({"analyze", "--repo", empty, "--attack-id", "keylogging"}).code == 3);
    CHECK(invoke({"report", "--repo", empty, "--attack-id", "keylogging", "--out", (dir / "x.csv").string()}).code == 3);
    CHECK(invoke({"ingest", "--repo", empty, "--input", (dir / "missing.csv").string()}).code == 1);

    CHECK(invoke({"seed-aia", "--repo", empty, "--network", fixture("aia/conflict_network.json"), "--attack",
                  fixture("aia/conflict_attack.json")})
              .code == 4);
    CHECK(invoke({"seed-aia", "--repo", empty, "--network", fixture("aia/zero_marginal_network.json"), "--attack",
                  fixture("aia/zero_marginal_attack.json")})
              .code == 4);
    CHECK(invoke({"seed-aia", "--repo", empty, "--network", fixture("aia/demo_network.json"), "--attack",
                  fixture("aia/conflict_attack.json")})
              .code == 2);

    test_support::copy_fixture_repository(dir / "corrupt");
    test_support::write_file(dir / "corrupt/cases/pcai-05.json", "{");
    const auto c = invoke({"analyze", "--repo", (dir / "corrupt").string(), "--attack-id", "x"});
    CHECK(c.code == 2);
    CHECK(c.err.find("pcai-05") != std::string::npos);
}

TEST_CASE("seed-aia stores a precedent chosen by belief") {
    test_support::TempDir dir;
    const std::string repo = (dir / "repo").string();
    const auto s = invoke({"seed-aia", "--repo", repo, "--network", fixture("aia/demo_network.json"), "--attack",
                           fixture("aia/demo_attack.json")});
    REQUIRE(s.code == 0);
    CHECK(s.out.find("0.666667") != std::string::npos);
    const auto handle = RepositoryHandle::open(repo);
    const auto seeded = handle.get_case("aia-demo-botnet");
    CHECK(seeded.status == CaseStatus::Precedent);
    CHECK(seeded.intention->id == "i1");
    CHECK(seeded.provenance.rfind("seeded-by-AIA", 0) == 0);
    CHECK(handle.get_network("demo-botnet").has_value());
}
