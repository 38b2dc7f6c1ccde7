#include <doctest.h>

#include "support/gen.hpp"
#include "taintweave/builtins.hpp"
#include "taintweave/extras.hpp"
#include "taintweave/pipeline.hpp"
#include "taintweave/validate.hpp"
#include "util.hpp"

using namespace taintweave;

namespace {

bool has_error(const std::vector<LinkError>& errs, LinkErrorKind kind) {
    for (const auto& e : errs)
        if (e.kind == kind) return true;
    return false;
}

} // namespace

TEST_CASE("validate flags unresolved targets and bad registers") {
    Program p = parse_program(
        "class A {\n"
        "  method static <A: void main()> regs 1 {\n"
        "    scall r0, <A: int missing()>\n"
        "    ret\n"
        "  }\n"
        "}\n"
        "entry <A: void main()>\n");
    CHECK(has_error(validate_program(p), LinkErrorKind::UnresolvedMethod));

    Program q = parse_program(
        "class A {\n"
        "  method static <A: void main()> regs 1 {\n"
        "    const r5, 1\n"
        "    ret\n"
        "  }\n"
        "}\n"
        "entry <A: void main()>\n");
    CHECK(has_error(validate_program(q), LinkErrorKind::BadRegister));

    Program r = parse_program(
        "class A extends B {\n"
        "  method static <A: void main()> regs 1 {\n"
        "    ret\n"
        "  }\n"
        "}\n"
        "class B extends A {\n"
        "}\n"
        "entry <A: void main()>\n");
    CHECK(has_error(validate_program(r), LinkErrorKind::CyclicHierarchy));

    Program s = parse_program(
        "class A {\n"
        "  method static <A: void main()> regs 1 {\n"
        "    jmp L9\n"
        "  }\n"
        "}\n"
        "entry <A: void main()>\n");
    CHECK(has_error(validate_program(s), LinkErrorKind::BadLabel));
}

TEST_CASE("validate accepts every corpus program") {
    for (const auto& entry : discover_corpus(TAINTWEAVE_CORPUS_DIR)) {
        Program p = parse_program(read_file(entry.tir_path));
        auto errs = validate_program(p);
        INFO(entry.name);
        CHECK(errs.empty());
    }
}

TEST_CASE("random programs are valid by construction") {
    testgen::Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        Program p = testgen::random_program(rng);
        auto errs = validate_program(p);
        if (!errs.empty()) {
            INFO(errs.front().render());
            FAIL_CHECK("iteration " << i);
            break;
        }
    }
}

TEST_CASE("facts capture call edges and overrides") {
    Program p = load_corpus("override_dispatch");
    FactBase fb = build_facts(p);
    bool found_override = false;
    for (const auto& o : fb.overrides)
        if (o.sub.owner == "B" && o.super.owner == "A") found_override = true;
    CHECK(found_override);
    // virtual site on the superclass flows CHA edges to the override
    bool edge_to_sub = false;
    for (const auto& [caller, callee] : fb.edges)
        if (callee.owner == "B") edge_to_sub = true;
    CHECK(edge_to_sub);
}

TEST_CASE("scope fixpoint on a hand-checked chain") {
    Program p = load_corpus("ex1_chain");
    FactBase fb = build_facts(p);
    SeedConfig seeds = default_seeds();
    auto src = compute_source_set(fb.edges, seeds);
    auto snk = compute_sink_set(fb.edges, seeds);
    for (const auto& s : seeds.source_seeds) CHECK(src.count(s) == 0);
    for (const auto& s : seeds.sink_seeds) CHECK(snk.count(s) == 0);
    ScopeResult scope = compute_intersection(src, snk);
    CHECK(!scope.intersection.empty());
    for (const auto& m : scope.intersection) {
        CHECK(src.count(m) == 1);
        CHECK(snk.count(m) == 1);
    }
}

TEST_CASE("generic fixpoint reaches stability") {
    // tiny two-step derivation: a -> b -> c
    auto sig = [](const char* n) { return MethodSig{"G", std::nullopt, n, {}}; };
    auto result = fixpoint({sig("a")}, [&](const std::set<MethodSig>& delta) {
        std::set<MethodSig> out;
        for (const auto& m : delta) {
            if (m.name == "a") out.insert(sig("b"));
            if (m.name == "b") out.insert(sig("c"));
        }
        return out;
    });
    CHECK(result.size() == 3);
}

TEST_CASE("extras rules add their fixtures") {
    SeedConfig seeds = default_seeds();

    Program over = load_corpus("override_dispatch");
    auto r = analyze_program(over, seeds);
    bool has_b = false;
    for (const auto& m : r.set.methods)
        if (m.owner == "B") has_b = true;
    CHECK(has_b);

    auto no_extras = analyze_program(over, seeds, AnalyzeOptions{.extras = false});
    for (const auto& m : no_extras.set.methods) CHECK(m.owner != "B");

    Program cb = load_corpus("callback");
    auto rc = analyze_program(cb, seeds);
    bool has_apply = false;
    for (const auto& m : rc.set.methods)
        if (m.name == "apply" && !is_builtin_class(m.owner)) has_apply = true;
    CHECK(has_apply);

    Program md = load_corpus("multidim");
    auto rm = analyze_program(md, seeds);
    bool has_mk = false;
    for (const auto& m : rm.set.methods)
        if (m.name == "mk") has_mk = true;
    CHECK(has_mk);
}

TEST_CASE("instrument set never contains builtins") {
    SeedConfig seeds = default_seeds();
    for (const auto& entry : discover_corpus(TAINTWEAVE_CORPUS_DIR)) {
        Program p = parse_program(read_file(entry.tir_path));
        auto r = analyze_program(p, seeds);
        for (const auto& m : r.set.methods) CHECK_FALSE(is_builtin_class(m.owner));
    }
}
