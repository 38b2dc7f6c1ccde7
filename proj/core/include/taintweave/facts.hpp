#pragma once

#include "taintweave/tir.hpp"

#include <set>

namespace taintweave {

enum class InvKind { Static, Virtual, Dynamic };

// One call site: method body index plus what is statically known about the
// callee. Dynamic sites carry the name-register's locally constant string
// values (empty when the name is not a local constant) and the receiver
// classes discovered by local `new` propagation (empty when unknown).
struct InvocationFact {
    MethodSig caller;
    int body_index = 0;
    InvKind kind = InvKind::Static;
    std::optional<MethodSig> declared; // absent for dynamic
    int arity = 0;                     // dynamic: argument count after the receiver
    std::vector<std::string> const_names;
    std::vector<std::string> recv_classes;

    auto operator<=>(const InvocationFact&) const = default;
};

using CallEdge = std::pair<MethodSig, MethodSig>; // (caller, callee)

struct OverrideFact {
    MethodSig sub;
    MethodSig super;
    auto operator<=>(const OverrideFact&) const = default;
};

struct ArrayFieldWriteFact {
    MethodSig method;
    std::string owner_class;
    std::string field;
    auto operator<=>(const ArrayFieldWriteFact&) const = default;
};

enum class BoundaryVia { Param, Return };

struct MultiDimBoundaryFact {
    MethodSig callee;
    BoundaryVia via = BoundaryVia::Param;
    auto operator<=>(const MultiDimBoundaryFact&) const = default;
};

struct FieldAccessFact {
    MethodSig method;
    std::string owner_class;
    std::string field;
    auto operator<=>(const FieldAccessFact&) const = default;
};

struct FactBase {
    std::vector<InvocationFact> invocations;
    std::set<CallEdge> edges; // populated by flatten_call_edges
    std::set<OverrideFact> overrides;
    std::set<ArrayFieldWriteFact> array_field_writes;
    std::set<MultiDimBoundaryFact> multidim_boundaries;
    std::set<FieldAccessFact> field_accesses; // every get/put, any field type
    std::set<MethodSig> stdlib_called;        // populated by mark_stdlib_called
};

// Extracts per-method relational facts. Precondition: validate_program(p)
// returned no errors.
FactBase extract_facts(const Program& p);

// The declared method plus every override in transitive subclasses of its
// owner.
std::set<MethodSig> cha_targets(const Program& p, const MethodSig& declared);

// Flattens call sites into (caller, callee) pairs: static sites directly,
// virtual sites over the CHA cone, dynamic sites over name-constant matches
// (or the receiver cone / arity-matching methods when unknown). Also adds
// synthetic edges from callback-accepting intrinsics to callback overrides.
FactBase flatten_call_edges(FactBase fb, const Program& p);

// Marks application methods reachable from stdlib callers (callback
// overrides the standard library may invoke).
FactBase mark_stdlib_called(FactBase fb, const Program& p);

// extract + flatten + mark, in order.
FactBase build_facts(const Program& p);

// `--dump-facts` text rendering, one fact per line.
std::string dump_facts(const FactBase& fb);

} // namespace taintweave
