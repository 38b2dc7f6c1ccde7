#include "taintweave/extras.hpp"

#include "taintweave/builtins.hpp"
#include "taintweave/transform.hpp"

#include <sstream>

namespace taintweave {

namespace {

bool observable_by(const FactBase& fb, const std::set<MethodSig>& current,
                   const std::string& owner_class, const std::string& field) {
    for (const auto& m : current)
        if (m.owner == owner_class) return true;
    for (const auto& a : fb.field_accesses)
        if (a.owner_class == owner_class && a.field == field && current.count(a.method)) return true;
    return false;
}

// CHA-cone consistency completion for rule 2: a rewritten virtual call site
// (caller in set, callee signature changes) must find the mangled name on
// every runtime receiver, so the whole cone joins the set.
std::set<MethodSig> infer_cone_completion(const FactBase& fb, const Program& p,
                                          const std::set<MethodSig>& current) {
    std::set<MethodSig> out;
    for (const auto& inv : fb.invocations) {
        if (inv.kind != InvKind::Virtual || !current.count(inv.caller)) continue;
        if (!transform_signature(*inv.declared).changed()) continue;
        std::set<MethodSig> cone = cha_targets(p, *inv.declared);
        bool any_in = false;
        for (const auto& t : cone) any_in = any_in || current.count(t);
        if (!any_in) continue;
        for (const auto& t : cone)
            if (!is_builtin_owner(t) && !current.count(t)) out.insert(t);
    }
    return out;
}

} // namespace

const char* rule_tag_name(RuleTag tag) {
    switch (tag) {
    case RuleTag::Intersection: return "intersection";
    case RuleTag::ArrayField: return "array-field";
    case RuleTag::Override: return "override";
    case RuleTag::StdlibCallback: return "stdlib-callback";
    case RuleTag::MultidimBoundary: return "multidim-boundary";
    }
    return "?";
}

std::set<MethodSig> infer_array_field_methods(const FactBase& fb, const std::set<MethodSig>& current,
                                              bool rule1_global) {
    std::set<MethodSig> out;
    for (const auto& w : fb.array_field_writes) {
        if (current.count(w.method) || is_builtin_owner(w.method)) continue;
        if (rule1_global || observable_by(fb, current, w.owner_class, w.field)) out.insert(w.method);
    }
    return out;
}

std::set<MethodSig> infer_override_closure(const FactBase& fb, const std::set<MethodSig>& current) {
    std::set<MethodSig> out;
    for (const auto& o : fb.overrides)
        if (current.count(o.super) && !current.count(o.sub) && !is_builtin_owner(o.sub))
            out.insert(o.sub);
    return out;
}

std::set<MethodSig> infer_stdlib_callbacks(const FactBase& fb, const std::set<MethodSig>& current) {
    std::set<MethodSig> out;
    for (const auto& m : fb.stdlib_called)
        if (!current.count(m) && !is_builtin_owner(m) && transform_signature(m).changed())
            out.insert(m);
    return out;
}

std::set<MethodSig> infer_multidim_boundary(const FactBase& fb, const std::set<CallEdge>& edges,
                                            const std::set<MethodSig>& current) {
    std::set<MethodSig> out;
    for (const auto& b : fb.multidim_boundaries) {
        if (current.count(b.callee) || is_builtin_owner(b.callee)) continue;
        for (const auto& [caller, callee] : edges)
            if (callee == b.callee && current.count(caller)) {
                out.insert(b.callee);
                break;
            }
    }
    return out;
}

InstrumentSet close_instrument_set(const FactBase& fb, const Program& p, const ScopeResult& scope,
                                   const ExtrasOptions& opts) {
    InstrumentSet set;
    for (const auto& m : scope.intersection) {
        if (is_builtin_owner(m)) continue;
        set.methods.insert(m);
        set.provenance.emplace(m, RuleTag::Intersection);
    }
    if (!opts.enabled) return set;

    bool changed = true;
    while (changed) {
        changed = false;
        auto absorb = [&](const std::set<MethodSig>& derived, RuleTag tag) {
            for (const auto& m : derived) {
                if (is_builtin_owner(m)) continue;
                if (set.methods.insert(m).second) {
                    set.provenance.emplace(m, tag);
                    changed = true;
                }
            }
        };
        absorb(infer_array_field_methods(fb, set.methods, opts.rule1_global), RuleTag::ArrayField);
        absorb(infer_override_closure(fb, set.methods), RuleTag::Override);
        absorb(infer_cone_completion(fb, p, set.methods), RuleTag::Override);
        absorb(infer_stdlib_callbacks(fb, set.methods), RuleTag::StdlibCallback);
        absorb(infer_multidim_boundary(fb, fb.edges, set.methods), RuleTag::MultidimBoundary);
    }
    return set;
}

std::string explain_instrument_set(const InstrumentSet& set) {
    std::ostringstream out;
    for (const auto& m : set.methods) {
        auto it = set.provenance.find(m);
        out << m.render() << "  rule="
            << (it == set.provenance.end() ? "?" : rule_tag_name(it->second)) << "\n";
    }
    return out.str();
}

} // namespace taintweave
