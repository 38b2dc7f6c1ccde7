#include "taintweave/validate.hpp"

#include "taintweave/builtins.hpp"
#include "taintweave/resolve.hpp"

#include <set>

namespace taintweave {

namespace {

struct Checker {
    const Program& p;
    std::vector<LinkError> errors;

    void error(LinkErrorKind kind, std::string msg, std::optional<MethodSig> ctx = std::nullopt) {
        errors.push_back({kind, std::move(msg), std::move(ctx)});
    }

    bool class_resolves(const std::string& name) { return lookup_class(p, name) != nullptr; }

    void check_type(const TypeDesc& t, const MethodSig& ctx) {
        std::string cls;
        if (t.kind == TypeKind::ClassRef) cls = t.class_name;
        else if (t.kind == TypeKind::Array && t.elem_kind == TypeKind::ClassRef) cls = t.elem_class;
        if (!cls.empty() && !class_resolves(cls))
            error(LinkErrorKind::UnknownClass, "unknown class '" + cls + "' in type", ctx);
    }

    void check_hierarchy() {
        for (const auto& c : p.classes) {
            std::set<std::string> seen{c.name};
            std::string cur = c.name;
            while (true) {
                const ClassDef* cd = lookup_class(p, cur);
                if (!cd) {
                    error(LinkErrorKind::UnknownClass, "unknown superclass '" + cur + "' of " + c.name);
                    break;
                }
                if (!cd->super) break;
                cur = *cd->super;
                if (!seen.insert(cur).second) {
                    error(LinkErrorKind::CyclicHierarchy, "superclass cycle through " + c.name);
                    break;
                }
            }
        }
    }

    void check_overrides() {
        for (const auto& c : p.classes) {
            if (!c.super) continue;
            for (const auto& m : c.methods) {
                ResolvedMethod super =
                    resolve_method(p, *c.super, m.sig.name, m.sig.params);
                if (!super.method) continue;
                if (super.method->sig.ret != m.sig.ret)
                    error(LinkErrorKind::BadOverride,
                          m.sig.render() + " overrides " + super.method->sig.render() +
                              " with a different return type",
                          m.sig);
                else if (super.method->is_static != m.is_static)
                    error(LinkErrorKind::BadOverride,
                          m.sig.render() + " changes staticness of " + super.method->sig.render(),
                          m.sig);
            }
        }
    }

    void check_entry() {
        if (!p.entry) {
            error(LinkErrorKind::MissingEntry, "no entry declaration");
            return;
        }
        ResolvedMethod r = resolve_method(p, *p.entry);
        if (!r.method || r.cls->name != p.entry->owner) {
            error(LinkErrorKind::MissingEntry, "entry method " + p.entry->render() + " not found");
            return;
        }
        if (!r.method->is_static || !r.method->sig.params.empty() || r.method->sig.ret)
            error(LinkErrorKind::BadEntry,
                  "entry must be a static parameterless void method: " + p.entry->render());
    }

    void check_method(const ClassDef& c, const MethodDef& m) {
        const MethodSig& ctx = m.sig;
        if (ctx.ret) check_type(*ctx.ret, ctx);
        for (const auto& t : ctx.params) check_type(t, ctx);

        int min_regs = static_cast<int>(ctx.params.size()) + (m.is_static ? 0 : 1);
        if (m.num_regs < min_regs)
            error(LinkErrorKind::BadRegister,
                  ctx.render() + " declares " + std::to_string(m.num_regs) +
                      " registers but parameters need " + std::to_string(min_regs),
                  ctx);

        auto reg_ok = [&](int r) { return r >= 0 && r < m.num_regs; };
        auto check_regs = [&](const Instruction& ins) {
            if (ins.dst >= m.num_regs)
                error(LinkErrorKind::BadRegister, "register r" + std::to_string(ins.dst) +
                                                      " out of range in " + ctx.render(),
                      ctx);
            for (int r : ins.regs)
                if (!reg_ok(r))
                    error(LinkErrorKind::BadRegister,
                          "register r" + std::to_string(r) + " out of range in " + ctx.render(), ctx);
        };
        auto check_label = [&](const std::string& label) {
            auto it = m.labels.find(label);
            if (it == m.labels.end() || it->second >= static_cast<int>(m.body.size()))
                error(LinkErrorKind::BadLabel, "label '" + label + "' unresolved in " + ctx.render(),
                      ctx);
        };

        for (const auto& ins : m.body) {
            check_regs(ins);
            switch (ins.op) {
            case Opcode::New:
                if (!class_resolves(ins.str))
                    error(LinkErrorKind::UnknownClass, "new of unknown class '" + ins.str + "'", ctx);
                break;
            case Opcode::NewArr:
            case Opcode::ALoad:
            case Opcode::AStore:
                check_type(*ins.type, ctx);
                break;
            case Opcode::Get:
            case Opcode::Put: {
                auto [cls, field] = split_field_ref(ins.str);
                if (cls.empty() || !class_resolves(cls))
                    error(LinkErrorKind::UnresolvedField,
                          "field ref '" + ins.str + "' has unknown class", ctx);
                else if (!resolve_field(p, cls, field))
                    error(LinkErrorKind::UnresolvedField, "field ref '" + ins.str + "' unresolved",
                          ctx);
                break;
            }
            case Opcode::SCall:
            case Opcode::VCall: {
                const MethodSig& t = *ins.target;
                ResolvedMethod r = resolve_method(p, t);
                bool is_static = r.method ? r.method->is_static : is_static_builtin(t);
                if (!r.method) {
                    error(LinkErrorKind::UnresolvedMethod, "call target " + t.render() + " unresolved",
                          ctx);
                    break;
                }
                if (ins.op == Opcode::SCall && !is_static)
                    error(LinkErrorKind::BadCall, "scall to instance method " + t.render(), ctx);
                if (ins.op == Opcode::VCall && is_static)
                    error(LinkErrorKind::BadCall, "vcall to static method " + t.render(), ctx);
                size_t expect = t.params.size() + (ins.op == Opcode::VCall ? 1 : 0);
                if (ins.regs.size() != expect)
                    error(LinkErrorKind::BadCall,
                          "call to " + t.render() + " passes " + std::to_string(ins.regs.size()) +
                              " args, expects " + std::to_string(expect),
                          ctx);
                if (ins.dst >= 0 && !t.ret)
                    error(LinkErrorKind::BadCall, "void call to " + t.render() + " has a result",
                          ctx);
                break;
            }
            case Opcode::DynCall:
                if (ins.regs.size() < 2)
                    error(LinkErrorKind::BadCall, "dyncall needs name and receiver registers", ctx);
                break;
            case Opcode::Jmp:
                check_label(ins.str);
                break;
            case Opcode::Br:
                check_label(ins.str);
                check_label(ins.str2);
                break;
            case Opcode::Ret:
                if ((ins.dst >= 0) != ctx.ret.has_value())
                    error(LinkErrorKind::BadRet,
                          std::string("ret ") + (ins.dst >= 0 ? "with" : "without") +
                              " value in " + ctx.render(),
                          ctx);
                break;
            default:
                break;
            }
        }

        // Control must not fall off the end of the body.
        if (m.body.empty()) {
            error(LinkErrorKind::BadRet, ctx.render() + " has an empty body", ctx);
        } else {
            Opcode last = m.body.back().op;
            if (last != Opcode::Ret && last != Opcode::Jmp && last != Opcode::Br)
                error(LinkErrorKind::BadRet, ctx.render() + " can fall off the end of its body", ctx);
        }
        (void)c;
    }
};

} // namespace

const char* link_error_kind_name(LinkErrorKind kind) {
    switch (kind) {
    case LinkErrorKind::UnresolvedMethod: return "unresolved-method";
    case LinkErrorKind::UnresolvedField: return "unresolved-field";
    case LinkErrorKind::UnknownClass: return "unknown-class";
    case LinkErrorKind::BadRegister: return "bad-register";
    case LinkErrorKind::BadLabel: return "bad-label";
    case LinkErrorKind::MissingEntry: return "missing-entry";
    case LinkErrorKind::BadEntry: return "bad-entry";
    case LinkErrorKind::CyclicHierarchy: return "cyclic-hierarchy";
    case LinkErrorKind::BadOverride: return "bad-override";
    case LinkErrorKind::BadCall: return "bad-call";
    case LinkErrorKind::BadRet: return "bad-ret";
    }
    return "?";
}

std::string LinkError::render() const {
    return std::string(link_error_kind_name(kind)) + ": " + message;
}

std::vector<LinkError> validate_program(const Program& p) {
    Checker ck{p, {}};
    ck.check_hierarchy();
    if (!ck.errors.empty()) return ck.errors; // resolution below assumes acyclic chains
    ck.check_overrides();
    ck.check_entry();
    for (const auto& c : p.classes)
        for (const auto& m : c.methods) ck.check_method(c, m);
    return ck.errors;
}

} // namespace taintweave
