#include <doctest.h>

#include "support/gen.hpp"
#include "taintweave/builtins.hpp"
#include "taintweave/instrument.hpp"
#include "taintweave/pipeline.hpp"
#include "taintweave/printer.hpp"
#include "taintweave/validate.hpp"
#include "util.hpp"

using namespace taintweave;

TEST_CASE("signature transform") {
    SUBCASE("primitive params and return") {
        auto tr = transform_signature(parse_sig("<A: int f(int,x.Y,bool)>"));
        REQUIRE(tr.changed());
        CHECK(tr.mangled->name == std::string("f") + kMangleSuffix);
        CHECK(tr.mangled->render() ==
              "<A: runtime.TaintedInt f" + std::string(kMangleSuffix) + "(int,x.Y,bool,int,int)>");
        CHECK(tr.boxed_return);
        REQUIRE(tr.shadow_param_map.size() == 3);
        CHECK(tr.shadow_param_map[0] == 3);
        CHECK_FALSE(tr.shadow_param_map[1].has_value());
        CHECK(tr.shadow_param_map[2] == 4);
    }
    SUBCASE("bool return boxes to TaintedBool") {
        auto tr = transform_signature(parse_sig("<A: bool p()>"));
        REQUIRE(tr.changed());
        CHECK(tr.mangled->ret->render() == kTaintedBool);
    }
    SUBCASE("primitive array param gets int[] shadow") {
        auto tr = transform_signature(parse_sig("<A: void g(int[])>"));
        REQUIRE(tr.changed());
        CHECK(tr.mangled->params[1].render() == "int[]");
        CHECK_FALSE(tr.boxed_return);
    }
    SUBCASE("reference-only signature is unchanged") {
        auto tr = transform_signature(parse_sig("<A: x.Y h(x.Y)>"));
        CHECK_FALSE(tr.changed());
    }
    SUBCASE("multi-dim-only signature is unchanged but lifted elsewhere") {
        auto tr = transform_signature(parse_sig("<A: int[][] mk()>"));
        CHECK_FALSE(tr.changed());
        TypeDesc lifted = lift_multidim(parse_type("int[][]"));
        CHECK(lifted.render() == std::string(kTaintedIntArray) + "[]");
        CHECK(lift_multidim(parse_type("int[][][]")).render() ==
              std::string(kTaintedIntArray) + "[][]");
        CHECK(lift_multidim(parse_type("int[]")).render() == "int[]");
        CHECK(lift_multidim(parse_type("x.Y[][]")).render() == "x.Y[][]");
    }
}

TEST_CASE("instrumented output validates and round trips") {
    SeedConfig seeds = default_seeds();
    for (const auto& entry : discover_corpus(TAINTWEAVE_CORPUS_DIR)) {
        INFO(entry.name);
        Program p = parse_program(read_file(entry.tir_path));
        auto r = analyze_program(p, seeds);
        InstrumentedProgram ip = instrument_program(p, r.set);
        auto errs = validate_program(ip.program);
        if (!errs.empty()) INFO(errs.front().render());
        CHECK(errs.empty());

        std::string text = emit_instrumented(ip);
        InstrumentedProgram back = parse_instrumented(text);
        CHECK(back.program == ip.program);
        CHECK(back.table == ip.table);
        CHECK(back.set.methods == r.set.methods);
        CHECK(emit_instrumented(back) == text);
    }
}

TEST_CASE("empty set leaves the program verbatim") {
    Program p = load_corpus("ex1_chain");
    InstrumentedProgram ip = instrument_program(p, InstrumentSet{});
    CHECK(ip.program == p);
}

TEST_CASE("instrumented methods carry shadow registers and stubs") {
    Program p = load_corpus("ex1_chain");
    auto r = analyze_program(p, default_seeds());
    REQUIRE(!r.set.methods.empty());
    MethodSig member = *r.set.methods.begin();
    const MethodDef* orig = p.find_method(member);
    REQUIRE(orig);
    auto out = instrument_method(p, *orig, r.set);
    auto tr = transform_signature(member);
    if (tr.changed()) {
        REQUIRE(out.size() == 2);
        CHECK(out[0].sig == *tr.mangled);
        CHECK(out[0].num_regs == 2 * orig->num_regs + 2);
        CHECK(out[1].sig == member); // forwarding stub keeps the original name
    } else {
        REQUIRE(out.size() == 1);
        CHECK(out[0].sig == member);
    }
}

TEST_CASE("shadow fields appear only on observable classes") {
    Program p = load_corpus("arrayfield");
    auto r = analyze_program(p, default_seeds());
    InstrumentedProgram ip = instrument_program(p, r.set);
    bool taint_arr_field = false;
    for (const auto& c : ip.program.classes)
        for (const auto& [name, type] : c.fields)
            if (name.find(kTaintArrFieldSuffix) != std::string::npos) taint_arr_field = true;
    CHECK(taint_arr_field);
}

TEST_CASE("reflection table maps names to stub or mangled targets") {
    Program p = load_corpus("reflection");
    auto r = analyze_program(p, default_seeds());
    InstrumentedProgram ip = instrument_program(p, r.set);
    CHECK(!ip.table.entries.empty());
    for (const auto& [key, val] : ip.table.entries) {
        const auto& [orig, mangled] = val;
        CHECK(orig.name == std::get<1>(key));
        if (mangled) CHECK(mangled->name == orig.name + kMangleSuffix);
    }
}
