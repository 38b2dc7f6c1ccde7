// Acceptance gate: one pass/fail line per required property, nonzero exit on
// any failure. Oracles here are deliberately naive re-implementations so a
// bug in the optimized code paths cannot hide itself.

#include "support/gen.hpp"
#include "taintweave/builtins.hpp"
#include "taintweave/extras.hpp"
#include "taintweave/parser.hpp"
#include "taintweave/pipeline.hpp"
#include "taintweave/printer.hpp"
#include "taintweave/validate.hpp"

#include <chrono>
#include <iostream>
#include <sstream>

using namespace taintweave;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!ok && !detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

MethodSig node_sig(int i) {
    return MethodSig{"G", std::nullopt, "n" + std::to_string(i), {}};
}

// Naive iterate-to-stability closures, quadratic on purpose.
std::set<MethodSig> naive_forward(const std::set<CallEdge>& edges, const SeedConfig& seeds) {
    std::set<MethodSig> result;
    for (const auto& [caller, callee] : edges)
        for (const auto& seed : seeds.source_seeds)
            if (callee == seed) result.insert(caller);
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [caller, callee] : edges)
            if (result.count(caller) && !result.count(callee)) {
                result.insert(callee);
                grew = true;
            }
    }
    for (const auto& seed : seeds.source_seeds) result.erase(seed);
    for (const auto& seed : seeds.sink_seeds) result.erase(seed);
    return result;
}

std::set<MethodSig> naive_backward(const std::set<CallEdge>& edges, const SeedConfig& seeds) {
    std::set<MethodSig> result;
    for (const auto& [caller, callee] : edges)
        for (const auto& seed : seeds.sink_seeds)
            if (callee == seed) result.insert(caller);
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [caller, callee] : edges)
            if (result.count(callee) && !result.count(caller)) {
                result.insert(caller);
                grew = true;
            }
    }
    for (const auto& seed : seeds.source_seeds) result.erase(seed);
    for (const auto& seed : seeds.sink_seeds) result.erase(seed);
    return result;
}

void criterion_fixpoint_oracle() {
    testgen::Rng rng(101);
    auto t0 = Clock::now();
    bool all_equal = true;
    std::string detail;
    for (int trial = 0; trial < 100 && all_equal; ++trial) {
        int n = std::uniform_int_distribution<int>(2, 300)(rng);
        std::set<CallEdge> edges;
        std::bernoulli_distribution edge(0.05);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b && edge(rng)) edges.emplace(node_sig(a), node_sig(b));

        SeedConfig seeds;
        std::uniform_int_distribution<int> node(0, n - 1);
        std::uniform_int_distribution<int> count(1, 3);
        for (int i = count(rng); i > 0; --i) seeds.source_seeds.push_back(node_sig(node(rng)));
        for (int i = count(rng); i > 0; --i) seeds.sink_seeds.push_back(node_sig(node(rng)));

        if (compute_source_set(edges, seeds) != naive_forward(edges, seeds) ||
            compute_sink_set(edges, seeds) != naive_backward(edges, seeds)) {
            all_equal = false;
            detail = "mismatch at trial " + std::to_string(trial);
        }
    }
    double secs = seconds_since(t0);
    if (secs >= 5.0) detail = "took " + std::to_string(secs) + "s";
    report("scoping fixpoint matches naive oracle on 100 random digraphs in <5s",
           all_equal && secs < 5.0, detail);
}

std::vector<CheckResult> corpus_results;

void criterion_detection_equivalence() {
    auto t0 = Clock::now();
    corpus_results = check_corpus(TAINTWEAVE_CORPUS_DIR, default_seeds());
    double secs = seconds_since(t0);
    bool ok = corpus_results.size() >= 15 && secs < 10.0;
    std::string detail;
    for (const auto& r : corpus_results)
        if (!r.detection) {
            ok = false;
            detail = r.program + ": " + r.detail;
            break;
        }
    if (corpus_results.size() < 15)
        detail = "only " + std::to_string(corpus_results.size()) + " corpus programs";
    if (secs >= 10.0) detail = "took " + std::to_string(secs) + "s";
    report("partial and full instrumentation report identical violations across the corpus (" +
               std::to_string(corpus_results.size()) + " programs, <10s)",
           ok, detail);
}

void criterion_extras_necessity() {
    SeedConfig seeds = default_seeds();
    bool ok = true;
    std::string detail;
    for (const char* name : {"override_dispatch", "callback", "multidim"}) {
        std::string path = std::string(TAINTWEAVE_CORPUS_DIR) + "/" + name;
        Program p = parse_program(read_file(path + ".tir"));
        Expectation e = parse_expectation(read_file(path + ".expect.json"));
        CheckResult with = check_program(name, p, seeds, e);
        CheckResult without = check_program(name, p, seeds, e, AnalyzeOptions{.extras = false});
        if (!with.ok()) {
            ok = false;
            detail = std::string(name) + " fails even with closure rules: " + with.detail;
        } else if (without.ok()) {
            ok = false;
            detail = std::string(name) + " still passes with --no-extras";
        }
    }
    report("each closure rule is necessary: its fixture fails under --no-extras", ok, detail);
}

void criterion_semantics_preserved() {
    bool ok = !corpus_results.empty();
    std::string detail;
    for (const auto& r : corpus_results)
        if (!r.semantics) {
            ok = false;
            detail = r.program + ": " + r.detail;
            break;
        }
    report("printed output identical across none/partial/full instrumentation", ok, detail);
}

bool validates_clean(const Program& p, std::string& detail, const std::string& what) {
    auto errs = validate_program(p);
    if (errs.empty()) return true;
    detail = what + ": " + errs.front().render();
    return false;
}

void criterion_linker_safety() {
    SeedConfig seeds = default_seeds();
    bool ok = true;
    std::string detail;

    auto probe = [&](const std::string& name, const Program& p) {
        if (!ok) return;
        auto sets = std::vector<std::pair<const char*, InstrumentSet>>{};
        sets.emplace_back("empty set", InstrumentSet{});
        sets.emplace_back("analyzed set", analyze_program(p, seeds).set);
        sets.emplace_back("full set", full_set(p));
        for (auto& [label, set] : sets) {
            InstrumentedProgram ip = instrument_program(p, set);
            if (!validates_clean(ip.program, detail, name + " / " + label)) {
                ok = false;
                return;
            }
        }
    };

    for (const auto& entry : discover_corpus(TAINTWEAVE_CORPUS_DIR))
        probe(entry.name, parse_program(read_file(entry.tir_path)));

    testgen::Rng rng(202);
    for (int i = 0; i < 200 && ok; ++i) {
        Program p = testgen::random_program(rng);
        if (!validates_clean(p, detail, "fuzzed #" + std::to_string(i) + " (uninstrumented)")) {
            ok = false;
            break;
        }
        probe("fuzzed #" + std::to_string(i), p);
    }
    report("instrumented output links cleanly (corpus + 200 fuzzed programs, 3 sets each)", ok,
           detail);
}

void criterion_overhead() {
    SeedConfig seeds = default_seeds();
    bool ok = true;
    std::string detail;
    bool saw_sparse = false;

    for (const auto& entry : discover_corpus(TAINTWEAVE_CORPUS_DIR)) {
        Program p = parse_program(read_file(entry.tir_path));
        Expectation e = parse_expectation(read_file(entry.expect_path));
        BenchRow row = bench_program(entry.name, p, seeds, e.input, 3);
        if (row.instructions_partial > row.instructions_full) {
            ok = false;
            detail = entry.name + ": partial executed more instructions than full";
            break;
        }
        if (e.scope_sparse) {
            saw_sparse = true;
            if (row.overhead_partial > 0.7 * row.overhead_full) {
                ok = false;
                detail = entry.name + ": partial overhead " + std::to_string(row.overhead_partial) +
                         "% not within 0.7x of full " + std::to_string(row.overhead_full) + "%";
                break;
            }
        }
    }
    if (!saw_sparse && ok) {
        ok = false;
        detail = "no scope-sparse corpus entry";
    }
    report("partial cost <= full everywhere; <=0.7x of full on scope-sparse programs", ok, detail);
}

void criterion_format_fidelity() {
    bool ok = true;
    std::string detail;

    const std::string ulocale = "<com.ibm.icu.util.ULocale$IDParser: void append(char)>";
    try {
        if (parse_sig(ulocale).render() != ulocale) {
            ok = false;
            detail = "nested-class signature did not round trip";
        }
    } catch (const ParseError& e) {
        ok = false;
        detail = std::string("nested-class signature rejected: ") + e.what();
    }

    testgen::Rng rng(303);
    std::uniform_int_distribution<int> setsize(0, 40);
    for (int i = 0; i < 1000 && ok; ++i) {
        MethodsFile f;
        for (int k = setsize(rng); k > 0; --k) f.methods.insert(testgen::random_sig(rng));
        std::string text = emit_methods_file(f);
        MethodsFile back = parse_methods_file(text);
        if (back != f || emit_methods_file(back) != text) {
            ok = false;
            detail = "methods file round trip diverged at iteration " + std::to_string(i);
        }
    }
    report("methods-file round trip byte-stable on 1000 random sets; exotic signatures parse", ok,
           detail);
}

void criterion_extras_idempotent() {
    SeedConfig seeds = default_seeds();
    bool ok = true;
    std::string detail;
    testgen::Rng rng(404);
    for (int i = 0; i < 100 && ok; ++i) {
        Program p = testgen::random_program(rng);
        FactBase fb = build_facts(p);
        auto src = compute_source_set(fb.edges, seeds);
        auto snk = compute_sink_set(fb.edges, seeds);
        ScopeResult scope = compute_intersection(std::move(src), std::move(snk));
        InstrumentSet set = close_instrument_set(fb, p, scope);

        // closed: no rule derives a new application method from the result
        auto check_subset = [&](std::set<MethodSig> derived, const char* rule) {
            for (const auto& m : derived)
                if (!is_builtin_class(m.owner) && !set.contains(m)) {
                    ok = false;
                    detail = "program #" + std::to_string(i) + ": rule " + rule +
                             " still derives " + m.render();
                }
        };
        check_subset(infer_array_field_methods(fb, set.methods), "array-field");
        check_subset(infer_override_closure(fb, set.methods), "override");
        check_subset(infer_stdlib_callbacks(fb, set.methods), "stdlib-callback");
        check_subset(infer_multidim_boundary(fb, fb.edges, set.methods), "multidim-boundary");

        // idempotent: re-closing from the result changes nothing
        ScopeResult again;
        again.intersection = set.methods;
        InstrumentSet twice = close_instrument_set(fb, p, again);
        if (twice.methods != set.methods) {
            ok = false;
            detail = "program #" + std::to_string(i) + ": re-closing changed the set";
        }
    }
    report("closure rules are idempotent and closed on 100 fuzzed programs", ok, detail);
}

} // namespace

int main() {
    criterion_fixpoint_oracle();
    criterion_detection_equivalence();
    criterion_extras_necessity();
    criterion_semantics_preserved();
    criterion_linker_safety();
    criterion_overhead();
    criterion_format_fidelity();
    criterion_extras_idempotent();

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}
