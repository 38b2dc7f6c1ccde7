#pragma once

#include "taintweave/vm.hpp"

#include <filesystem>

namespace taintweave {

struct AnalyzeOptions {
    bool extras = true;
    bool rule1_global = false;
    bool source_caller_closure = false;
};

struct AnalysisResult {
    FactBase facts;
    ScopeResult scope;
    InstrumentSet set;
};

// facts -> scope -> extras closure. Precondition: validate_program(p) clean.
AnalysisResult analyze_program(const Program& p, const SeedConfig& seeds,
                               const AnalyzeOptions& opts = {});

// Every application method: the "complete instrumentation" set.
InstrumentSet full_set(const Program& p);

// Per-program expectations stored next to each corpus .tir file.
struct Expectation {
    std::vector<long long> input;
    std::vector<ViolationRecord> violations; // call stacks unused
    std::optional<std::vector<long long>> output;
    bool scope_sparse = false;
};

Expectation parse_expectation(const std::string& json_text);
std::string emit_expectation(const Expectation& e);

struct CorpusEntry {
    std::string name;
    std::filesystem::path tir_path;
    std::filesystem::path expect_path; // may not exist
};

std::vector<CorpusEntry> discover_corpus(const std::filesystem::path& dir);

// One none/partial/full comparison for a single program.
struct CheckResult {
    std::string program;
    bool detection = false; // violations(partial) = violations(full) = expected
    bool semantics = false; // printed output equal across none/partial/full
    bool linker = false;    // instrumented outputs validate cleanly
    bool overhead = false;  // instructions none <= partial <= full
    std::string detail;     // first failure explanation

    bool ok() const { return detection && semantics && linker && overhead; }
};

CheckResult check_program(const std::string& name, const Program& p, const SeedConfig& seeds,
                          const Expectation& expect, const AnalyzeOptions& opts = {});
std::vector<CheckResult> check_corpus(const std::filesystem::path& dir, const SeedConfig& seeds);

struct BenchRow {
    std::string program;
    long long instructions_none = 0;
    long long instructions_partial = 0;
    long long instructions_full = 0;
    double overhead_partial = 0; // (partial - none) / none * 100
    double overhead_full = 0;
    int methods_total = 0;
    int methods_instrumented_partial = 0;
};

BenchRow bench_program(const std::string& name, const Program& p, const SeedConfig& seeds,
                       const std::vector<long long>& input, int iterations = 10);
std::vector<BenchRow> bench_corpus(const std::filesystem::path& dir, const SeedConfig& seeds,
                                   int iterations = 10);
std::string bench_csv(const std::vector<BenchRow>& rows);
std::string bench_text(const std::vector<BenchRow>& rows);
std::vector<BenchRow> parse_bench_csv(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace taintweave
