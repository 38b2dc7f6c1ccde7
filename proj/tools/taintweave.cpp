#include "taintweave/pipeline.hpp"

#include "taintweave/parser.hpp"
#include "taintweave/printer.hpp"
#include "taintweave/validate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

using namespace taintweave;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolations = 2;
constexpr int kExitRunError = 3;

struct Fail {
    int code;
    std::string message;
};

Program load_program(const std::string& path) {
    Program p = parse_program(read_file(path)); // ParseError propagates
    auto errs = validate_program(p);
    if (!errs.empty()) {
        std::string msg = path + ": " + errs.front().render();
        if (errs.size() > 1) msg += " (+" + std::to_string(errs.size() - 1) + " more)";
        throw Fail{kExitUsage, msg};
    }
    return p;
}

SeedConfig load_seeds(const std::string& path) {
    if (path.empty()) return default_seeds();
    return parse_seeds_file(read_file(path));
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) std::cout << content;
    else write_file_atomic(out_path, content);
}

int cmd_analyze(const std::string& program_path, const std::string& seeds_path,
                const std::string& out_path, const AnalyzeOptions& opts, bool dump,
                const std::vector<std::string>& explain, bool explain_given, bool as_json) {
    Program p = load_program(program_path);
    SeedConfig seeds = load_seeds(seeds_path);
    AnalysisResult r = analyze_program(p, seeds, opts);

    if (dump) std::cout << dump_facts(r.facts);
    if (explain_given) {
        std::string all = explain_instrument_set(r.set);
        if (explain.empty()) {
            std::cout << all;
        } else {
            MethodSig wanted = parse_sig(explain.front());
            auto it = r.set.provenance.find(wanted);
            if (it == r.set.provenance.end())
                throw Fail{kExitUsage, explain.front() + " is not in the instrument set"};
            std::cout << it->first.render() << "  rule=" << rule_tag_name(it->second) << "\n";
        }
    }
    if (as_json) {
        json j;
        auto sigs = [](const std::set<MethodSig>& s) {
            json a = json::array();
            for (const auto& m : s) a.push_back(m.render());
            return a;
        };
        j["sources"] = sigs(r.scope.source_set);
        j["sinks"] = sigs(r.scope.sink_set);
        j["intersection"] = sigs(r.scope.intersection);
        j["instrument_set"] = sigs(r.set.methods);
        std::cout << j.dump(2) << "\n";
    }

    MethodsFile mf{r.set.methods};
    emit(out_path, emit_methods_file(mf));
    return kExitOk;
}

int cmd_instrument(const std::string& program_path, const std::string& methods_path,
                   const std::string& seeds_path, const std::string& out_path, bool full,
                   bool none) {
    Program p = load_program(program_path);
    InstrumentSet set;
    if (full) {
        set = full_set(p);
    } else if (!none) {
        std::set<MethodSig> listed;
        if (methods_path.empty()) {
            // no methods file: run the analysis inline
            set = analyze_program(p, load_seeds(seeds_path)).set;
        } else {
            listed = parse_methods_file(read_file(methods_path)).methods;
            std::string unknown;
            for (const auto& sig : listed)
                if (!p.find_method(sig)) unknown += (unknown.empty() ? "" : ", ") + sig.render();
            if (!unknown.empty())
                throw Fail{kExitUsage, methods_path + " lists unknown methods: " + unknown};
            set.methods = std::move(listed);
        }
    }
    emit(out_path, emit_instrumented(instrument_program(p, set)));
    return kExitOk;
}

int cmd_run(const std::string& program_path, const std::string& seeds_path,
            const std::vector<long long>& input, long long budget, bool fail_on_violation,
            bool trace_calls) {
    InstrumentedProgram ip = parse_instrumented(read_file(program_path));
    auto errs = validate_program(ip.program);
    if (!errs.empty()) throw Fail{kExitUsage, program_path + ": " + errs.front().render()};

    RunConfig cfg;
    cfg.input_values = input;
    cfg.seeds = load_seeds(seeds_path);
    cfg.instruction_budget = budget;
    cfg.trace_calls = trace_calls;

    RunReport report = run(ip, cfg);
    std::cout << report.to_json();
    if (trace_calls)
        for (const auto& [caller, callee] : report.call_trace)
            std::cerr << "call " << caller.render() << " -> " << callee.render() << "\n";

    if (report.halted != HaltKind::Normal) return kExitRunError;
    if (fail_on_violation && !report.violations.empty()) return kExitViolations;
    return kExitOk;
}

int cmd_bench(const std::string& corpus_dir, const std::string& seeds_path, int iterations,
              const std::string& csv_path, const std::string& out_path) {
    std::vector<BenchRow> rows = bench_corpus(corpus_dir, load_seeds(seeds_path), iterations);
    if (!csv_path.empty()) write_file_atomic(csv_path, bench_csv(rows));
    emit(out_path, bench_text(rows));
    return kExitOk;
}

int cmd_check(const std::string& corpus_dir, const std::string& seeds_path) {
    std::vector<CheckResult> results = check_corpus(corpus_dir, load_seeds(seeds_path));
    bool all_ok = true;
    std::cout << "program                     detection semantics linker overhead\n";
    for (const auto& r : results) {
        all_ok = all_ok && r.ok();
        std::cout << r.program;
        for (size_t i = r.program.size(); i < 26; ++i) std::cout << ' ';
        auto cell = [](bool b) { return b ? " pass     " : " FAIL     "; };
        std::cout << cell(r.detection) << cell(r.semantics) << cell(r.linker)
                  << (r.overhead ? " pass" : " FAIL");
        if (!r.ok() && !r.detail.empty()) std::cout << "   (" << r.detail << ")";
        std::cout << "\n";
    }
    std::cout << results.size() << " program(s), " << (all_ok ? "all pass" : "failures present")
              << "\n";
    return all_ok ? kExitOk : kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"partial taint-instrumentation toolchain for TIR programs"};
    app.require_subcommand(1);

    std::string seeds_path, out_path;

    auto* analyze = app.add_subcommand("analyze", "compute the instrument set for a program");
    std::string an_program;
    AnalyzeOptions an_opts;
    bool an_dump = false, an_json = false, an_no_extras = false;
    std::vector<std::string> an_explain;
    analyze->add_option("program", an_program, "TIR program file")->required();
    analyze->add_option("--seeds", seeds_path, "seeds file ([sources]/[sinks])");
    analyze->add_option("--out", out_path, "methods file destination (default stdout)");
    analyze->add_flag("--dump-facts", an_dump, "print extracted facts");
    analyze->add_option("--explain", an_explain, "print rule provenance (optionally for one signature)")
        ->expected(0, 1);
    analyze->add_flag("--source-caller-closure", an_opts.source_caller_closure,
                      "also close sources over callers");
    analyze->add_flag("--rule1-global", an_opts.rule1_global,
                      "array-field rule without the observability scope");
    analyze->add_flag("--no-extras", an_no_extras, "intersection only, skip closure rules");
    analyze->add_flag("--json", an_json, "print analysis summary as JSON");

    auto* instrument = app.add_subcommand("instrument", "rewrite a program for taint tracking");
    std::string in_program, in_methods;
    bool in_full = false, in_none = false;
    instrument->add_option("program", in_program, "TIR program file")->required();
    instrument->add_option("methods", in_methods, "methods file from analyze");
    instrument->add_option("--seeds", seeds_path, "seeds file (used when no methods file given)");
    instrument->add_option("--out", out_path, "instrumented program destination (default stdout)");
    instrument->add_flag("--full", in_full, "instrument every application method");
    instrument->add_flag("--none", in_none, "embed an empty instrument set");

    auto* runc = app.add_subcommand("run", "execute a (possibly instrumented) program");
    std::string run_program;
    std::vector<long long> run_input;
    long long run_budget = 100'000'000;
    bool run_fail = false, run_trace = false;
    runc->add_option("program", run_program, "program file")->required();
    runc->add_option("--seeds", seeds_path, "seeds file (label bits and sink filtering)");
    runc->add_option("--input", run_input, "input values consumed by stdlib.In")->delimiter(',');
    runc->add_option("--budget", run_budget, "instruction budget")->check(CLI::PositiveNumber);
    runc->add_flag("--fail-on-violation", run_fail, "exit 2 when violations were recorded");
    runc->add_flag("--trace-calls", run_trace, "log call edges to stderr");

    auto* bench = app.add_subcommand("bench", "instruction-count table over a corpus");
    std::string bench_dir, bench_csv_path;
    int bench_iters = 10;
    bench->add_option("corpus", bench_dir, "directory of .tir programs")->required();
    bench->add_option("--seeds", seeds_path, "seeds file");
    bench->add_option("--iterations", bench_iters, "iterations per run (last one measured)")
        ->check(CLI::PositiveNumber);
    bench->add_option("--csv", bench_csv_path, "also write CSV here");
    bench->add_option("--out", out_path, "text table destination (default stdout)");

    auto* check = app.add_subcommand("check", "verify detection/semantics/linker/overhead per program");
    std::string check_dir;
    check->add_option("corpus", check_dir, "directory of .tir programs with .expect.json files")
        ->required();
    check->add_option("--seeds", seeds_path, "seeds file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) {
            an_opts.extras = !an_no_extras;
            return cmd_analyze(an_program, seeds_path, out_path, an_opts, an_dump, an_explain,
                               analyze->count("--explain") > 0, an_json);
        }
        if (*instrument) {
            if (in_full && in_none) throw Fail{kExitUsage, "--full and --none are exclusive"};
            return cmd_instrument(in_program, in_methods, seeds_path, out_path, in_full, in_none);
        }
        if (*runc) return cmd_run(run_program, seeds_path, run_input, run_budget, run_fail, run_trace);
        if (*bench) return cmd_bench(bench_dir, seeds_path, bench_iters, bench_csv_path, out_path);
        if (*check) return cmd_check(check_dir, seeds_path);
    } catch (const Fail& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what();
        if (e.line > 0) std::cerr << " (line " << e.line << ")";
        std::cerr << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
