#include "taintweave/resolve.hpp"

#include "taintweave/builtins.hpp"

#include <set>

namespace taintweave {

const ClassDef* lookup_class(const Program& p, const std::string& name) {
    if (const ClassDef* c = p.find_class(name)) return c;
    return builtin_class(name);
}

bool is_subclass_of(const Program& p, const std::string& sub, const std::string& super) {
    std::set<std::string> seen;
    std::string cur = sub;
    while (true) {
        if (!seen.insert(cur).second) return false; // cycle
        const ClassDef* c = lookup_class(p, cur);
        if (!c) return false;
        if (cur == super) return true;
        if (!c->super) return false;
        cur = *c->super;
    }
}

ResolvedMethod resolve_method(const Program& p, const std::string& owner, const std::string& name,
                              const std::vector<TypeDesc>& params) {
    std::set<std::string> seen;
    std::string cur = owner;
    while (seen.insert(cur).second) {
        const ClassDef* c = lookup_class(p, cur);
        if (!c) return {};
        if (const MethodDef* m = c->find_method(name, params)) return {c, m};
        if (!c->super) return {};
        cur = *c->super;
    }
    return {};
}

ResolvedMethod resolve_method(const Program& p, const MethodSig& sig) {
    ResolvedMethod r = resolve_method(p, sig.owner, sig.name, sig.params);
    if (r.method && r.method->sig.ret != sig.ret) return {};
    return r;
}

const TypeDesc* resolve_field(const Program& p, const std::string& owner, const std::string& field) {
    std::set<std::string> seen;
    std::string cur = owner;
    while (seen.insert(cur).second) {
        const ClassDef* c = lookup_class(p, cur);
        if (!c) return nullptr;
        if (const TypeDesc* t = c->find_field(field)) return t;
        if (!c->super) return nullptr;
        cur = *c->super;
    }
    return nullptr;
}

std::vector<std::string> subclasses_of(const Program& p, const std::string& name) {
    std::vector<std::string> out;
    for (const auto& c : p.classes)
        if (c.name != name && is_subclass_of(p, c.name, name)) out.push_back(c.name);
    return out;
}

} // namespace taintweave
