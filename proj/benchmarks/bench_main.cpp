#include <benchmark/benchmark.h>

#include "taintweave/parser.hpp"
#include "taintweave/pipeline.hpp"
#include "taintweave/vm.hpp"

#include <random>

using namespace taintweave;

namespace {

MethodSig node_sig(int i) {
    return MethodSig{"G", std::nullopt, "n" + std::to_string(i), {}};
}

std::set<CallEdge> random_edges(int n, double p, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution edge(p);
    std::set<CallEdge> edges;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b && edge(rng)) edges.emplace(node_sig(a), node_sig(b));
    return edges;
}

Program corpus_program(const char* name) {
    return parse_program(read_file(std::string(TAINTWEAVE_CORPUS_DIR) + "/" + name + ".tir"));
}

void bm_scope_fixpoint(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    auto edges = random_edges(n, 0.05, 42);
    SeedConfig seeds;
    seeds.source_seeds = {node_sig(0)};
    seeds.sink_seeds = {node_sig(n - 1)};
    for (auto _ : state) {
        auto src = compute_source_set(edges, seeds);
        auto snk = compute_sink_set(edges, seeds);
        benchmark::DoNotOptimize(compute_intersection(std::move(src), std::move(snk)));
    }
}
BENCHMARK(bm_scope_fixpoint)->Arg(50)->Arg(150)->Arg(300);

void bm_analyze(benchmark::State& state) {
    Program p = corpus_program("scope_sparse");
    SeedConfig seeds = default_seeds();
    for (auto _ : state) benchmark::DoNotOptimize(analyze_program(p, seeds));
}
BENCHMARK(bm_analyze);

void bm_instrument(benchmark::State& state) {
    Program p = corpus_program("scope_sparse");
    auto r = analyze_program(p, default_seeds());
    for (auto _ : state) benchmark::DoNotOptimize(instrument_program(p, r.set));
}
BENCHMARK(bm_instrument);

void bm_run_partial(benchmark::State& state) {
    Program p = corpus_program("scope_sparse");
    auto r = analyze_program(p, default_seeds());
    InstrumentedProgram ip = instrument_program(p, r.set);
    RunConfig cfg;
    cfg.input_values = {5};
    for (auto _ : state) benchmark::DoNotOptimize(run(ip, cfg));
}
BENCHMARK(bm_run_partial);

void bm_run_full(benchmark::State& state) {
    Program p = corpus_program("scope_sparse");
    InstrumentedProgram ip = instrument_program(p, full_set(p));
    RunConfig cfg;
    cfg.input_values = {5};
    for (auto _ : state) benchmark::DoNotOptimize(run(ip, cfg));
}
BENCHMARK(bm_run_full);

} // namespace

BENCHMARK_MAIN();
