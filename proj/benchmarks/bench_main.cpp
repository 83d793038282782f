#include "intent_cbr/aia.hpp"
#include "intent_cbr/cbr.hpp"
#include "intent_cbr/mass_function.hpp"

#include "test_support.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace intent_cbr;

static void BM_Similarity(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto a = test_support::random_case(rng, "a");
    const auto b = test_support::random_case(rng, "b");
    for (auto _ : state) benchmark::DoNotOptimize(cbr::similarity(a, b).score);
}
BENCHMARK(BM_Similarity);

static void BM_Retrieve(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::vector<Case> pool;
    for (int i = 0; i < state.range(0); ++i) pool.push_back(test_support::random_case(rng, "p" + std::to_string(i)));
    const auto probe = test_support::random_case(rng, "probe");
    for (auto _ : state) benchmark::DoNotOptimize(cbr::retrieve(probe, std::span<const Case>(pool), 10));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Retrieve)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_Combine(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const auto frame = test_support::make_frame(static_cast<std::size_t>(state.range(0)));
    const auto m1 = test_support::random_mass(rng, frame);
    const auto m2 = test_support::random_mass(rng, frame);
    for (auto _ : state) benchmark::DoNotOptimize(combine(m1, m2));
}
BENCHMARK(BM_Combine)->Arg(2)->Arg(8)->Arg(32);

static void BM_RunAia(benchmark::State& state) {
    const int n_intent = 8;
    const int n_ev = static_cast<int>(state.range(0));
    CausalNetwork n;
    n.attack_id = "bench";
    Attack attack{"bench", "bench", 0.9, {}};
    for (int i = 0; i < n_intent; ++i) {
        const std::string id = "i" + std::to_string(i);
        n.intentions.push_back({id, id, std::nullopt});
        n.priors[id] = 1.0 / n_intent;
    }
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    for (int e = 0; e < n_ev; ++e) {
        const std::string ev = "ev" + std::to_string(e);
        n.evidence_ids.push_back(ev);
        attack.evidence.push_back({ev, EvidenceKind::Other, {}, "", 1.0});
        for (const auto& in : n.intentions) n.likelihoods[ev][in.id] = unit(rng);
    }
    for (auto _ : state) benchmark::DoNotOptimize(aia::run_aia(attack, n, {}));
}
BENCHMARK(BM_RunAia)->Arg(5)->Arg(50);

BENCHMARK_MAIN();
