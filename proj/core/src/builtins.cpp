#include "taintweave/builtins.hpp"

#include "taintweave/transform.hpp"

namespace taintweave {

namespace {

MethodSig make_sig(std::string owner, std::optional<TypeDesc> ret, std::string name,
                   std::vector<TypeDesc> params) {
    return MethodSig{std::move(owner), std::move(ret), std::move(name), std::move(params)};
}

MethodDef decl_only(MethodSig sig) {
    MethodDef m;
    m.is_static = is_static_builtin(sig);
    m.sig = std::move(sig);
    return m;
}

// Intrinsics get native taint-aware variants under the mangled name, so
// instrumented call sites resolve during validation.
void add_with_variant(ClassDef& c, const MethodSig& sig) {
    c.methods.push_back(decl_only(sig));
    SignatureTransform tr = transform_signature(sig);
    if (tr.changed()) c.methods.push_back(decl_only(*tr.mangled));
}

std::vector<ClassDef> make_builtins() {
    TypeDesc ti = TypeDesc::make_int();
    TypeDesc tb = TypeDesc::make_bool();
    TypeDesc ia = TypeDesc::make_array(TypeKind::Int, "", 1);

    std::vector<ClassDef> out;

    ClassDef in{"stdlib.In", std::nullopt, {}, {}};
    add_with_variant(in, sig_in_read());
    add_with_variant(in, sig_in_readbuf());
    out.push_back(std::move(in));

    ClassDef o{"stdlib.Out", std::nullopt, {}, {}};
    add_with_variant(o, sig_out_write());
    add_with_variant(o, sig_out_print());
    out.push_back(std::move(o));

    ClassDef sys{"stdlib.Sys", std::nullopt, {}, {}};
    add_with_variant(sys, sig_sys_exec());
    out.push_back(std::move(sys));

    ClassDef hof{"stdlib.Hof", std::nullopt, {}, {}};
    add_with_variant(hof, sig_hof_map());
    out.push_back(std::move(hof));

    ClassDef fn{"stdlib.Fn", std::nullopt, {}, {}};
    add_with_variant(fn, sig_fn_apply());
    out.push_back(std::move(fn));

    out.push_back(ClassDef{kTaintedInt, std::nullopt, {{"val", ti}, {"taint", ti}}, {}});
    out.push_back(ClassDef{kTaintedBool, std::nullopt, {{"val", tb}, {"taint", ti}}, {}});
    out.push_back(ClassDef{kTaintedIntArray, std::nullopt, {{"arr", ia}, {"taintArr", ia}}, {}});

    ClassDef arr{"runtime.Arr", std::nullopt, {}, {}};
    arr.methods.push_back(decl_only(sig_arr_zeroslike()));
    arr.methods.push_back(decl_only(sig_arr_lift2()));
    arr.methods.push_back(decl_only(sig_arr_unlift2()));
    out.push_back(std::move(arr));

    return out;
}

} // namespace

bool is_stdlib_class(const std::string& name) { return name.starts_with("stdlib."); }
bool is_runtime_class(const std::string& name) { return name.starts_with("runtime."); }
bool is_builtin_class(const std::string& name) {
    return is_stdlib_class(name) || is_runtime_class(name);
}
bool is_builtin_owner(const MethodSig& sig) { return is_builtin_class(sig.owner); }

const std::vector<ClassDef>& builtin_classes() {
    static const std::vector<ClassDef> classes = make_builtins();
    return classes;
}

const ClassDef* builtin_class(const std::string& name) {
    for (const auto& c : builtin_classes())
        if (c.name == name) return &c;
    return nullptr;
}

const MethodSig& sig_in_read() {
    static const MethodSig s = make_sig("stdlib.In", TypeDesc::make_int(), "read", {});
    return s;
}
const MethodSig& sig_in_readbuf() {
    static const MethodSig s =
        make_sig("stdlib.In", std::nullopt, "readBuf", {TypeDesc::make_array(TypeKind::Int, "", 1)});
    return s;
}
const MethodSig& sig_out_write() {
    static const MethodSig s = make_sig("stdlib.Out", std::nullopt, "write", {TypeDesc::make_int()});
    return s;
}
const MethodSig& sig_out_print() {
    static const MethodSig s = make_sig("stdlib.Out", std::nullopt, "print", {TypeDesc::make_int()});
    return s;
}
const MethodSig& sig_sys_exec() {
    static const MethodSig s = make_sig("stdlib.Sys", std::nullopt, "exec", {TypeDesc::make_int()});
    return s;
}
const MethodSig& sig_hof_map() {
    static const MethodSig s = make_sig(
        "stdlib.Hof", TypeDesc::make_int(), "map",
        {TypeDesc::make_class("stdlib.Fn"), TypeDesc::make_int()});
    return s;
}
const MethodSig& sig_fn_apply() {
    static const MethodSig s = make_sig("stdlib.Fn", TypeDesc::make_int(), "apply", {TypeDesc::make_int()});
    return s;
}
const MethodSig& sig_arr_zeroslike() {
    static const MethodSig s = make_sig(
        "runtime.Arr", TypeDesc::make_array(TypeKind::Int, "", 1), "zeroslike",
        {TypeDesc::make_array(TypeKind::Int, "", 1)});
    return s;
}

const MethodSig& sig_arr_lift2() {
    static const MethodSig s = make_sig(
        "runtime.Arr", TypeDesc::make_array(TypeKind::ClassRef, kTaintedIntArray, 1), "lift2",
        {TypeDesc::make_array(TypeKind::Int, "", 2)});
    return s;
}
const MethodSig& sig_arr_unlift2() {
    static const MethodSig s = make_sig(
        "runtime.Arr", TypeDesc::make_array(TypeKind::Int, "", 2), "unlift2",
        {TypeDesc::make_array(TypeKind::ClassRef, kTaintedIntArray, 1)});
    return s;
}

bool is_sink_intrinsic(const MethodSig& sig) {
    return sig == sig_out_write() || sig == sig_sys_exec();
}

bool is_static_builtin(const MethodSig& sig) {
    return is_builtin_class(sig.owner) && sig.owner != "stdlib.Fn";
}

const std::vector<std::pair<MethodSig, MethodSig>>& callback_intrinsics() {
    static const std::vector<std::pair<MethodSig, MethodSig>> v = {
        {sig_hof_map(), sig_fn_apply()},
    };
    return v;
}

} // namespace taintweave
