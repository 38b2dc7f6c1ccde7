#pragma once

#include "taintweave/facts.hpp"
#include "taintweave/scope.hpp"

#include <map>

namespace taintweave {

enum class RuleTag { Intersection, ArrayField, Override, StdlibCallback, MultidimBoundary };

const char* rule_tag_name(RuleTag tag);

// The closed set of methods to instrument, with the first rule that added
// each member. Never contains stdlib.* or runtime.* signatures.
struct InstrumentSet {
    std::set<MethodSig> methods;
    std::map<MethodSig, RuleTag> provenance;

    bool contains(const MethodSig& sig) const { return methods.count(sig) != 0; }
};

struct ExtrasOptions {
    bool enabled = true;      // false = `--no-extras`: intersection only
    bool rule1_global = false; // `--rule1-global`: unscoped array-field rule
};

// Rule 1: writers of array-typed class fields observable by the current set
// (a member belongs to the owning class or accesses the field).
std::set<MethodSig> infer_array_field_methods(const FactBase& fb, const std::set<MethodSig>& current,
                                              bool rule1_global = false);

// Rule 2: methods overriding a member of the current set.
std::set<MethodSig> infer_override_closure(const FactBase& fb, const std::set<MethodSig>& current);

// Rule 2b: stdlib-invoked callback overrides whose signature would change.
std::set<MethodSig> infer_stdlib_callbacks(const FactBase& fb, const std::set<MethodSig>& current);

// Rule 3: multi-dim-array-boundary methods called from the current set.
std::set<MethodSig> infer_multidim_boundary(const FactBase& fb, const std::set<CallEdge>& edges,
                                            const std::set<MethodSig>& current);

// Joint fixpoint of the four rules (plus the CHA-cone consistency completion
// of rule 2 for rewritten virtual call sites), starting from the scope
// intersection. Filters stdlib/runtime signatures.
InstrumentSet close_instrument_set(const FactBase& fb, const Program& p, const ScopeResult& scope,
                                   const ExtrasOptions& opts = {});

// `--explain` rendering: one `<sig>  rule=<tag>` line per member.
std::string explain_instrument_set(const InstrumentSet& set);

} // namespace taintweave
