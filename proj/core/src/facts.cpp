#include "taintweave/facts.hpp"

#include "taintweave/builtins.hpp"
#include "taintweave/resolve.hpp"

#include <algorithm>
#include <sstream>

namespace taintweave {

namespace {

// Declaring class of a field reachable from `owner`, for normalized facts.
std::string declaring_class(const Program& p, const std::string& owner, const std::string& field) {
    std::string cur = owner;
    for (int guard = 0; guard < 1024; ++guard) {
        const ClassDef* c = lookup_class(p, cur);
        if (!c) return owner;
        if (c->find_field(field)) return cur;
        if (!c->super) return owner;
        cur = *c->super;
    }
    return owner;
}

void extract_method_facts(const Program& p, const MethodDef& m, FactBase& fb) {
    for (size_t i = 0; i < m.body.size(); ++i) {
        const Instruction& ins = m.body[i];
        switch (ins.op) {
        case Opcode::SCall:
        case Opcode::VCall: {
            InvocationFact f;
            f.caller = m.sig;
            f.body_index = static_cast<int>(i);
            f.kind = ins.op == Opcode::SCall ? InvKind::Static : InvKind::Virtual;
            f.declared = ins.target;
            fb.invocations.push_back(std::move(f));
            break;
        }
        case Opcode::DynCall: {
            InvocationFact f;
            f.caller = m.sig;
            f.body_index = static_cast<int>(i);
            f.kind = InvKind::Dynamic;
            f.arity = static_cast<int>(ins.regs.size()) - 2;
            int name_reg = ins.regs[0];
            int recv_reg = ins.regs[1];
            for (const auto& other : m.body) {
                if (other.op == Opcode::SConst && other.dst == name_reg)
                    f.const_names.push_back(other.str);
                if (other.op == Opcode::New && other.dst == recv_reg)
                    f.recv_classes.push_back(other.str);
            }
            std::sort(f.const_names.begin(), f.const_names.end());
            f.const_names.erase(std::unique(f.const_names.begin(), f.const_names.end()),
                                f.const_names.end());
            std::sort(f.recv_classes.begin(), f.recv_classes.end());
            f.recv_classes.erase(std::unique(f.recv_classes.begin(), f.recv_classes.end()),
                                 f.recv_classes.end());
            fb.invocations.push_back(std::move(f));
            break;
        }
        case Opcode::Put: {
            auto [cls, field] = split_field_ref(ins.str);
            std::string decl = declaring_class(p, cls, field);
            fb.field_accesses.insert({m.sig, decl, field});
            const TypeDesc* ft = resolve_field(p, cls, field);
            if (ft && ft->is_array()) fb.array_field_writes.insert({m.sig, decl, field});
            break;
        }
        case Opcode::Get: {
            auto [cls, field] = split_field_ref(ins.str);
            fb.field_accesses.insert({m.sig, declaring_class(p, cls, field), field});
            break;
        }
        default:
            break;
        }
    }
}

bool has_multidim(const TypeDesc& t) { return t.is_array() && t.dims > 1; }

} // namespace

FactBase extract_facts(const Program& p) {
    FactBase fb;
    for (const auto& c : p.classes) {
        for (const auto& m : c.methods) {
            extract_method_facts(p, m, fb);

            // overrides against every ancestor declaring the same (name, params)
            if (c.super) {
                std::string cur = *c.super;
                while (const ClassDef* sc = lookup_class(p, cur)) {
                    if (const MethodDef* sm = sc->find_method(m.sig.name, m.sig.params))
                        fb.overrides.insert({m.sig, sm->sig});
                    if (!sc->super) break;
                    cur = *sc->super;
                }
            }

            for (const auto& t : m.sig.params)
                if (has_multidim(t)) {
                    fb.multidim_boundaries.insert({m.sig, BoundaryVia::Param});
                    break;
                }
            if (m.sig.ret && has_multidim(*m.sig.ret))
                fb.multidim_boundaries.insert({m.sig, BoundaryVia::Return});
        }
    }
    return fb;
}

std::set<MethodSig> cha_targets(const Program& p, const MethodSig& declared) {
    std::set<MethodSig> out;
    out.insert(declared);
    for (const auto& sub : subclasses_of(p, declared.owner)) {
        const ClassDef* c = p.find_class(sub);
        if (!c) continue;
        if (const MethodDef* m = c->find_method(declared.name, declared.params)) out.insert(m->sig);
    }
    return out;
}

FactBase flatten_call_edges(FactBase fb, const Program& p) {
    std::vector<MethodSig> app_methods = p.all_method_sigs();

    for (const auto& inv : fb.invocations) {
        switch (inv.kind) {
        case InvKind::Static:
            fb.edges.insert({inv.caller, *inv.declared});
            break;
        case InvKind::Virtual:
            for (const auto& t : cha_targets(p, *inv.declared)) fb.edges.insert({inv.caller, t});
            break;
        case InvKind::Dynamic: {
            if (!inv.const_names.empty()) {
                for (const auto& m : app_methods)
                    for (const auto& name : inv.const_names)
                        if (m.name == name) fb.edges.insert({inv.caller, m});
            } else if (!inv.recv_classes.empty()) {
                for (const auto& rc : inv.recv_classes) {
                    for (const auto& m : app_methods)
                        if (is_subclass_of(p, m.owner, rc) || is_subclass_of(p, rc, m.owner))
                            fb.edges.insert({inv.caller, m});
                }
            } else {
                // receiver unknown: every instance method is a candidate
                for (const auto& c : p.classes)
                    for (const auto& m : c.methods)
                        if (!m.is_static) fb.edges.insert({inv.caller, m.sig});
            }
            break;
        }
        }
    }

    // Callback-accepting intrinsics behave as callers of the callback
    // signature's CHA cone.
    for (const auto& [intrinsic, callback] : callback_intrinsics()) {
        bool used = false;
        for (const auto& inv : fb.invocations)
            if (inv.declared && *inv.declared == intrinsic) used = true;
        if (!used) continue;
        for (const auto& t : cha_targets(p, callback)) fb.edges.insert({intrinsic, t});
    }
    return fb;
}

FactBase mark_stdlib_called(FactBase fb, const Program& p) {
    for (const auto& [caller, callee] : fb.edges)
        if (is_stdlib_class(caller.owner) && p.find_method(callee)) fb.stdlib_called.insert(callee);
    return fb;
}

FactBase build_facts(const Program& p) {
    return mark_stdlib_called(flatten_call_edges(extract_facts(p), p), p);
}

std::string dump_facts(const FactBase& fb) {
    std::ostringstream out;
    for (const auto& [a, b] : fb.edges) out << "EDGE " << a.render() << " -> " << b.render() << "\n";
    for (const auto& o : fb.overrides)
        out << "OVERRIDE " << o.sub.render() << " over " << o.super.render() << "\n";
    for (const auto& w : fb.array_field_writes)
        out << "ARRFIELD " << w.method.render() << " writes " << w.owner_class << "." << w.field
            << "\n";
    for (const auto& b : fb.multidim_boundaries)
        out << "MDIM " << b.callee.render() << " via "
            << (b.via == BoundaryVia::Param ? "param" : "return") << "\n";
    for (const auto& m : fb.stdlib_called) out << "STDLIBCB " << m.render() << "\n";
    return out.str();
}

} // namespace taintweave
