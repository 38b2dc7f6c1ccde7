#include "taintweave/transform.hpp"

#include "taintweave/builtins.hpp"

namespace taintweave {

TypeDesc lift_multidim(const TypeDesc& t) {
    if (!t.is_prim_multidim()) return t;
    return TypeDesc::make_array(TypeKind::ClassRef, kTaintedIntArray, t.dims - 1);
}

SignatureTransform transform_signature(const MethodSig& s) {
    SignatureTransform tr;
    tr.original = s;
    tr.shadow_param_map.assign(s.params.size(), std::nullopt);

    bool prim_return = s.ret && s.ret->is_primitive();
    bool any_shadow_param = false;
    for (const auto& p : s.params)
        if (p.is_primitive() || p.is_prim_array1()) any_shadow_param = true;
    if (!prim_return && !any_shadow_param) return tr;

    MethodSig m;
    m.owner = s.owner;
    m.name = s.name + kMangleSuffix;
    for (const auto& p : s.params) m.params.push_back(lift_multidim(p));
    for (size_t i = 0; i < s.params.size(); ++i) {
        const TypeDesc& p = s.params[i];
        if (p.is_primitive()) {
            tr.shadow_param_map[i] = static_cast<int>(m.params.size());
            m.params.push_back(TypeDesc::make_int());
        } else if (p.is_prim_array1()) {
            tr.shadow_param_map[i] = static_cast<int>(m.params.size());
            m.params.push_back(TypeDesc::make_array(TypeKind::Int, "", 1));
        }
    }
    if (prim_return) {
        tr.boxed_return = true;
        m.ret = TypeDesc::make_class(s.ret->kind == TypeKind::Bool ? kTaintedBool : kTaintedInt);
    } else if (s.ret) {
        m.ret = lift_multidim(*s.ret);
    }
    tr.mangled = std::move(m);
    return tr;
}

} // namespace taintweave
