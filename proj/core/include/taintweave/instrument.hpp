#pragma once

#include "taintweave/extras.hpp"
#include "taintweave/transform.hpp"

#include <map>

namespace taintweave {

// Runtime dispatch table for dyncall: (class, method name, arity) ->
// (original signature, mangled signature when instrumented).
struct ReflectionTable {
    using Key = std::tuple<std::string, std::string, int>;
    std::map<Key, std::pair<MethodSig, std::optional<MethodSig>>> entries;

    auto operator<=>(const ReflectionTable&) const = default;
};

struct InstrumentedProgram {
    Program program;
    ReflectionTable table;
    InstrumentSet set; // embedded; provenance not serialized
};

// Instrumented body (under the mangled signature when the signature
// changes) plus an original-signature stub that forwards with default
// taints. One element when the signature is unchanged.
std::vector<MethodDef> instrument_method(const Program& p, const MethodDef& m,
                                         const InstrumentSet& set);

// Call-site rewriting for one scall/vcall inside an instrumented body.
// Uninstrumented callers keep their instructions verbatim (the original
// signature always resolves, to the stub when the callee is instrumented).
std::vector<Instruction> rewrite_call_site(const Program& p, const InstrumentSet& set,
                                           const Instruction& call, int num_regs_original);

// Adds f$$taint / g$$taintArr companions for primitive and primitive-array
// fields of classes observable by the set; other classes unchanged.
ClassDef add_shadow_fields(const Program& p, const ClassDef& c, const InstrumentSet& set);

ReflectionTable build_reflection_table(const Program& p, const InstrumentSet& set);

// Whole-program transform. Preconditions: validate_program(p) is clean and
// `set` is closed (module extras). The output program validates cleanly.
InstrumentedProgram instrument_program(const Program& p, const InstrumentSet& set);

// Text codec: program text plus `reflection-table { ... }` and
// `instrument-set { ... }` sections. Plain TIR parses to an
// InstrumentedProgram with empty table and set.
std::string emit_instrumented(const InstrumentedProgram& ip);
InstrumentedProgram parse_instrumented(const std::string& text);

} // namespace taintweave
