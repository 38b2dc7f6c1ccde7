#pragma once

#include "taintweave/instrument.hpp"
#include "taintweave/scope.hpp"

namespace taintweave {

struct ViolationRecord {
    MethodSig sink;
    std::uint64_t mask = 0; // non-zero
    long long ordinal = 0;  // count of sink calls so far, 1-based
    std::vector<MethodSig> call_stack;

    // Equality for detection-equivalence checks deliberately ignores the
    // call stack: partial and full instrumentation differ in stub frames.
    bool same_violation(const ViolationRecord& o) const {
        return sink == o.sink && mask == o.mask && ordinal == o.ordinal;
    }
};

struct RunConfig {
    std::vector<long long> input_values;
    SeedConfig seeds = default_seeds();
    long long instruction_budget = 100'000'000;
    bool trace_calls = false;
};

enum class HaltKind { Normal, BudgetExceeded, RunError };

struct RunReport {
    std::vector<long long> printed_output;
    std::vector<ViolationRecord> violations;
    long long executed_instructions = 0;
    std::vector<CallEdge> call_trace;
    HaltKind halted = HaltKind::Normal;
    std::string error; // RunError only

    std::string to_json() const;
    bool detection_equal(const RunReport& o) const;
};

// Deterministic interpretation from the entry method. A plain Program runs
// as an InstrumentedProgram with an empty set; an empty reflection table is
// rebuilt from the program so dyncall works either way.
RunReport run(const InstrumentedProgram& ip, const RunConfig& cfg);
RunReport run(const Program& p, const RunConfig& cfg);

// Runtime reflection dispatch: walks recv_class's superclass chain for a
// (class, name, arity) table entry. Instrumented callers get the mangled
// signature when one exists; everyone else gets the original (the stub, if
// the method is instrumented). nullopt when no entry matches.
std::optional<MethodSig> dispatch_dynamic(const ReflectionTable& table, const Program& p,
                                          const std::string& name, const std::string& recv_class,
                                          int arity, bool caller_in_set);

} // namespace taintweave
