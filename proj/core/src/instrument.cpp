#include "taintweave/instrument.hpp"

#include "taintweave/builtins.hpp"
#include "taintweave/parser.hpp"
#include "taintweave/printer.hpp"
#include "taintweave/resolve.hpp"

#include <sstream>

namespace taintweave {

namespace {

Instruction mk_const(int dst, long long v) {
    Instruction i;
    i.op = Opcode::Const;
    i.dst = dst;
    i.literal = v;
    return i;
}
Instruction mk_move(int dst, int src) {
    Instruction i;
    i.op = Opcode::Move;
    i.dst = dst;
    i.regs = {src};
    return i;
}
Instruction mk_new(int dst, std::string cls) {
    Instruction i;
    i.op = Opcode::New;
    i.dst = dst;
    i.str = std::move(cls);
    return i;
}
Instruction mk_get(int dst, int obj, std::string field_ref) {
    Instruction i;
    i.op = Opcode::Get;
    i.dst = dst;
    i.regs = {obj};
    i.str = std::move(field_ref);
    return i;
}
Instruction mk_put(int obj, std::string field_ref, int src) {
    Instruction i;
    i.op = Opcode::Put;
    i.regs = {obj, src};
    i.str = std::move(field_ref);
    return i;
}
Instruction mk_scall(int dst, MethodSig target, std::vector<int> args) {
    Instruction i;
    i.op = Opcode::SCall;
    i.dst = dst;
    i.target = std::move(target);
    i.regs = std::move(args);
    return i;
}
Instruction mk_ret(int reg) {
    Instruction i;
    i.op = Opcode::Ret;
    i.dst = reg;
    return i;
}

std::string box_class_for(const TypeDesc& prim) {
    return prim.kind == TypeKind::Bool ? kTaintedBool : kTaintedInt;
}

// Classes whose instances carry shadow state: a set member belongs to the
// class or accesses one of its fields.
std::set<std::string> compute_shadow_classes(const Program& p, const InstrumentSet& set) {
    std::set<std::string> out;
    for (const auto& sig : set.methods) out.insert(sig.owner);
    for (const auto& c : p.classes) {
        for (const auto& m : c.methods) {
            if (!set.contains(m.sig)) continue;
            for (const auto& ins : m.body) {
                if (ins.op != Opcode::Get && ins.op != Opcode::Put) continue;
                auto [cls, field] = split_field_ref(ins.str);
                // normalize to the declaring class
                std::string cur = cls;
                while (const ClassDef* cd = lookup_class(p, cur)) {
                    if (cd->find_field(field)) {
                        out.insert(cur);
                        break;
                    }
                    if (!cd->super) break;
                    cur = *cd->super;
                }
            }
        }
    }
    return out;
}

struct BodyRewriter {
    const Program& p;
    const InstrumentSet& set;
    const std::set<std::string>& shadow_classes;
    const MethodDef& orig;
    int R;       // original register count
    int t0, t1;  // scratch registers

    std::vector<Instruction> out;

    BodyRewriter(const Program& p_, const InstrumentSet& set_,
                 const std::set<std::string>& shadow_cls, const MethodDef& m)
        : p(p_), set(set_), shadow_classes(shadow_cls), orig(m), R(m.num_regs), t0(2 * m.num_regs),
          t1(2 * m.num_regs + 1) {}

    int sh(int r) const { return R + r; }

    bool field_shadowed(const std::string& field_ref, TypeDesc& type_out) const {
        auto [cls, field] = split_field_ref(field_ref);
        std::string cur = cls;
        while (const ClassDef* cd = lookup_class(p, cur)) {
            if (const TypeDesc* t = cd->find_field(field)) {
                type_out = *t;
                return shadow_classes.count(cur) != 0;
            }
            if (!cd->super) break;
            cur = *cd->super;
        }
        return false;
    }

    // Shadow for a call result produced without taint information.
    void emit_default_result_shadow(int dst, const std::optional<TypeDesc>& ret) {
        if (dst < 0) return;
        if (ret && ret->is_prim_array1())
            out.push_back(mk_scall(sh(dst), sig_arr_zeroslike(), {dst}));
        else
            out.push_back(mk_const(sh(dst), 0));
    }

    void rewrite_call(const Instruction& ins) {
        const MethodSig& target = *ins.target;
        if (is_runtime_class(target.owner)) { // generated helpers, never rewritten
            out.push_back(ins);
            return;
        }
        SignatureTransform tr = transform_signature(target);
        bool callee_active = set.contains(target) || is_stdlib_class(target.owner);
        if (!callee_active || !tr.changed()) {
            out.push_back(ins);
            emit_default_result_shadow(ins.dst, target.ret);
            return;
        }
        Instruction call = ins;
        call.target = tr.mangled;
        int argbase = ins.op == Opcode::VCall ? 1 : 0;
        for (size_t i = 0; i < target.params.size(); ++i)
            if (tr.shadow_param_map[i])
                call.regs.push_back(sh(ins.regs[argbase + i]));
        if (tr.boxed_return && ins.dst >= 0) {
            call.dst = t0;
            out.push_back(std::move(call));
            std::string box = box_class_for(*target.ret);
            out.push_back(mk_get(ins.dst, t0, box + ".val"));
            out.push_back(mk_get(sh(ins.dst), t0, box + ".taint"));
        } else {
            out.push_back(std::move(call));
            emit_default_result_shadow(ins.dst, tr.mangled->ret);
        }
    }

    void rewrite(const Instruction& ins, const std::optional<TypeDesc>& method_ret, bool mangled) {
        switch (ins.op) {
        case Opcode::Const:
        case Opcode::SConst:
            out.push_back(ins);
            out.push_back(mk_const(sh(ins.dst), 0));
            break;
        case Opcode::Move:
            out.push_back(ins);
            out.push_back(mk_move(sh(ins.dst), sh(ins.regs[0])));
            break;
        case Opcode::Bin: {
            out.push_back(ins);
            Instruction taint;
            taint.op = Opcode::Bin;
            taint.bin_op = BinOp::Or;
            taint.dst = sh(ins.dst);
            taint.regs = {sh(ins.regs[0]), sh(ins.regs[1])};
            out.push_back(std::move(taint));
            break;
        }
        case Opcode::New:
            out.push_back(ins);
            out.push_back(mk_const(sh(ins.dst), 0));
            break;
        case Opcode::NewArr: {
            const TypeDesc& elem = *ins.type;
            if (elem.is_primitive()) {
                out.push_back(ins);
                Instruction shadow = ins;
                shadow.dst = sh(ins.dst);
                shadow.type = TypeDesc::make_int();
                out.push_back(std::move(shadow));
            } else if (elem.is_prim_array()) {
                // allocating a lifted multi-dim array
                Instruction lifted = ins;
                lifted.type = elem.dims == 1
                                  ? TypeDesc::make_class(kTaintedIntArray)
                                  : TypeDesc::make_array(TypeKind::ClassRef, kTaintedIntArray,
                                                         elem.dims - 1);
                out.push_back(std::move(lifted));
                out.push_back(mk_const(sh(ins.dst), 0));
            } else {
                out.push_back(ins);
                out.push_back(mk_const(sh(ins.dst), 0));
            }
            break;
        }
        case Opcode::ALoad: {
            const TypeDesc& elem = *ins.type;
            if (elem.is_primitive()) {
                out.push_back(ins);
                Instruction shadow = ins;
                shadow.dst = sh(ins.dst);
                shadow.regs[0] = sh(ins.regs[0]);
                shadow.type = TypeDesc::make_int();
                out.push_back(std::move(shadow));
            } else if (elem.is_prim_array1()) {
                Instruction load = ins;
                load.dst = t0;
                load.type = TypeDesc::make_class(kTaintedIntArray);
                out.push_back(std::move(load));
                out.push_back(mk_get(ins.dst, t0, std::string(kTaintedIntArray) + ".arr"));
                out.push_back(mk_get(sh(ins.dst), t0, std::string(kTaintedIntArray) + ".taintArr"));
            } else if (elem.is_prim_array()) {
                Instruction load = ins;
                load.type =
                    TypeDesc::make_array(TypeKind::ClassRef, kTaintedIntArray, elem.dims - 1);
                out.push_back(std::move(load));
                out.push_back(mk_const(sh(ins.dst), 0));
            } else {
                out.push_back(ins);
                out.push_back(mk_const(sh(ins.dst), 0));
            }
            break;
        }
        case Opcode::AStore: {
            const TypeDesc& elem = *ins.type;
            if (elem.is_primitive()) {
                out.push_back(ins);
                Instruction shadow = ins;
                shadow.regs[0] = sh(ins.regs[0]);
                shadow.regs[2] = sh(ins.regs[2]);
                shadow.type = TypeDesc::make_int();
                out.push_back(std::move(shadow));
            } else if (elem.is_prim_array1()) {
                out.push_back(mk_new(t0, kTaintedIntArray));
                out.push_back(mk_put(t0, std::string(kTaintedIntArray) + ".arr", ins.regs[2]));
                out.push_back(
                    mk_put(t0, std::string(kTaintedIntArray) + ".taintArr", sh(ins.regs[2])));
                Instruction store = ins;
                store.regs[2] = t0;
                store.type = TypeDesc::make_class(kTaintedIntArray);
                out.push_back(std::move(store));
            } else if (elem.is_prim_array()) {
                Instruction store = ins;
                store.type =
                    TypeDesc::make_array(TypeKind::ClassRef, kTaintedIntArray, elem.dims - 1);
                out.push_back(std::move(store));
            } else {
                out.push_back(ins);
            }
            break;
        }
        case Opcode::Get: {
            out.push_back(ins);
            TypeDesc ftype;
            if (field_shadowed(ins.str, ftype) && ftype.is_primitive())
                out.push_back(mk_get(sh(ins.dst), ins.regs[0], ins.str + kTaintFieldSuffix));
            else if (field_shadowed(ins.str, ftype) && ftype.is_prim_array1())
                out.push_back(mk_get(sh(ins.dst), ins.regs[0], ins.str + kTaintArrFieldSuffix));
            else
                out.push_back(mk_const(sh(ins.dst), 0));
            break;
        }
        case Opcode::Put: {
            out.push_back(ins);
            TypeDesc ftype;
            if (field_shadowed(ins.str, ftype) && ftype.is_primitive())
                out.push_back(mk_put(ins.regs[0], ins.str + kTaintFieldSuffix, sh(ins.regs[1])));
            else if (field_shadowed(ins.str, ftype) && ftype.is_prim_array1())
                out.push_back(mk_put(ins.regs[0], ins.str + kTaintArrFieldSuffix, sh(ins.regs[1])));
            break;
        }
        case Opcode::SCall:
        case Opcode::VCall:
            rewrite_call(ins);
            break;
        case Opcode::DynCall: {
            // pass value args then their shadows, then the result's shadow
            // register; the VM routes them per the runtime dispatch decision
            Instruction call = ins;
            size_t n = ins.regs.size() - 2;
            for (size_t j = 0; j < n; ++j) call.regs.push_back(sh(ins.regs[2 + j]));
            if (ins.dst >= 0) call.regs.push_back(sh(ins.dst));
            out.push_back(std::move(call));
            break;
        }
        case Opcode::Ret: {
            if (mangled && ins.dst >= 0 && method_ret && method_ret->is_primitive()) {
                std::string box = box_class_for(*method_ret);
                out.push_back(mk_new(t0, box));
                out.push_back(mk_put(t0, box + ".val", ins.dst));
                out.push_back(mk_put(t0, box + ".taint", sh(ins.dst)));
                out.push_back(mk_ret(t0));
            } else {
                out.push_back(ins);
            }
            break;
        }
        case Opcode::Jmp:
        case Opcode::Br:
            out.push_back(ins);
            break;
        }
    }
};

MethodDef make_stub(const MethodDef& m, const SignatureTransform& tr) {
    int k = static_cast<int>(m.sig.params.size());
    int argbase = m.is_static ? 0 : 1;
    int nargs = argbase + k;
    int s = static_cast<int>(tr.mangled->params.size()) - k;
    int t0 = nargs + s;
    int t1 = t0 + 1;

    MethodDef stub;
    stub.sig = m.sig;
    stub.is_static = m.is_static;
    stub.num_regs = nargs + s + 2;

    // default taints: zero masks, zero shadow arrays
    for (int i = 0; i < k; ++i) {
        if (!tr.shadow_param_map[i]) continue;
        int shadow_reg = nargs + (*tr.shadow_param_map[i] - k);
        const TypeDesc& pt = m.sig.params[i];
        if (pt.is_primitive())
            stub.body.push_back(mk_const(shadow_reg, 0));
        else
            stub.body.push_back(mk_scall(shadow_reg, sig_arr_zeroslike(), {argbase + i}));
    }
    // the mangled method expects lifted multi-dim arguments
    for (int i = 0; i < k; ++i)
        if (m.sig.params[i].is_prim_multidim() && m.sig.params[i].dims == 2)
            stub.body.push_back(mk_scall(argbase + i, sig_arr_lift2(), {argbase + i}));

    Instruction call;
    call.op = m.is_static ? Opcode::SCall : Opcode::VCall;
    call.target = tr.mangled;
    for (int r = 0; r < nargs + s; ++r) call.regs.push_back(r);
    call.dst = tr.mangled->ret ? t0 : -1;
    stub.body.push_back(std::move(call));

    if (tr.boxed_return) {
        stub.body.push_back(mk_get(t1, t0, box_class_for(*m.sig.ret) + ".val"));
        stub.body.push_back(mk_ret(t1));
    } else if (m.sig.ret) {
        if (m.sig.ret->is_prim_multidim() && m.sig.ret->dims == 2)
            stub.body.push_back(mk_scall(t0, sig_arr_unlift2(), {t0}));
        stub.body.push_back(mk_ret(t0));
    } else {
        stub.body.push_back(mk_ret(-1));
    }
    return stub;
}

MethodDef instrument_body(const Program& p, const InstrumentSet& set,
                          const std::set<std::string>& shadow_cls, const MethodDef& m) {
    SignatureTransform tr = transform_signature(m.sig);
    BodyRewriter rw(p, set, shadow_cls, m);

    MethodDef out;
    out.is_static = m.is_static;
    out.num_regs = 2 * m.num_regs + 2;
    out.sig = tr.changed() ? *tr.mangled : m.sig;

    if (tr.changed()) {
        // relocate incoming shadow arguments next to their parameters
        int k = static_cast<int>(m.sig.params.size());
        int argbase = m.is_static ? 0 : 1;
        for (int i = k - 1; i >= 0; --i) {
            if (!tr.shadow_param_map[i]) continue;
            int src = argbase + *tr.shadow_param_map[i];
            int dst = rw.sh(argbase + i);
            if (src != dst) rw.out.push_back(mk_move(dst, src));
        }
    }

    std::vector<int> index_map(m.body.size(), 0);
    for (size_t i = 0; i < m.body.size(); ++i) {
        index_map[i] = static_cast<int>(rw.out.size());
        rw.rewrite(m.body[i], m.sig.ret, tr.changed());
    }
    for (const auto& [label, idx] : m.labels)
        out.labels[label] = idx < static_cast<int>(m.body.size())
                                ? index_map[idx]
                                : static_cast<int>(rw.out.size());
    out.body = std::move(rw.out);
    return out;
}

} // namespace

std::vector<MethodDef> instrument_method(const Program& p, const MethodDef& m,
                                         const InstrumentSet& set) {
    std::set<std::string> shadow_cls = compute_shadow_classes(p, set);
    SignatureTransform tr = transform_signature(m.sig);
    std::vector<MethodDef> out;
    out.push_back(instrument_body(p, set, shadow_cls, m));
    if (tr.changed()) out.push_back(make_stub(m, tr));
    return out;
}

std::vector<Instruction> rewrite_call_site(const Program& p, const InstrumentSet& set,
                                           const Instruction& call, int num_regs_original) {
    MethodDef dummy;
    dummy.num_regs = num_regs_original;
    std::set<std::string> shadow_cls = compute_shadow_classes(p, set);
    BodyRewriter rw(p, set, shadow_cls, dummy);
    if (call.op == Opcode::SCall || call.op == Opcode::VCall) rw.rewrite_call(call);
    else rw.rewrite(call, std::nullopt, false);
    return std::move(rw.out);
}

ClassDef add_shadow_fields(const Program& p, const ClassDef& c, const InstrumentSet& set) {
    std::set<std::string> shadow_cls = compute_shadow_classes(p, set);
    if (!shadow_cls.count(c.name)) return c;
    ClassDef out = c;
    for (const auto& [fname, ftype] : c.fields) {
        if (ftype.is_primitive())
            out.fields.emplace_back(fname + kTaintFieldSuffix, TypeDesc::make_int());
        else if (ftype.is_prim_array1())
            out.fields.emplace_back(fname + kTaintArrFieldSuffix,
                                    TypeDesc::make_array(TypeKind::Int, "", 1));
    }
    return out;
}

ReflectionTable build_reflection_table(const Program& p, const InstrumentSet& set) {
    ReflectionTable table;
    for (const auto& c : p.classes) {
        for (const auto& m : c.methods) {
            if (m.is_static) continue; // dyncall always has a receiver
            ReflectionTable::Key key{c.name, m.sig.name, static_cast<int>(m.sig.params.size())};
            if (table.entries.count(key)) continue; // arity collision: first wins
            SignatureTransform tr = transform_signature(m.sig);
            std::optional<MethodSig> mangled;
            if (set.contains(m.sig) && tr.changed()) mangled = tr.mangled;
            table.entries.emplace(key, std::make_pair(m.sig, std::move(mangled)));
        }
    }
    return table;
}

InstrumentedProgram instrument_program(const Program& p, const InstrumentSet& set) {
    std::set<std::string> shadow_cls = compute_shadow_classes(p, set);
    InstrumentedProgram ip;
    ip.set = set;
    ip.table = build_reflection_table(p, set);
    ip.program.entry = p.entry;
    for (const auto& c : p.classes) {
        ClassDef out = add_shadow_fields(p, c, set);
        out.methods.clear();
        for (const auto& m : c.methods) {
            if (!set.contains(m.sig)) {
                out.methods.push_back(m);
                continue;
            }
            SignatureTransform tr = transform_signature(m.sig);
            out.methods.push_back(instrument_body(p, set, shadow_cls, m));
            if (tr.changed()) out.methods.push_back(make_stub(m, tr));
        }
        ip.program.classes.push_back(std::move(out));
    }
    return ip;
}

std::string emit_instrumented(const InstrumentedProgram& ip) {
    std::ostringstream out;
    out << emit_program(ip.program);
    out << "reflection-table {\n";
    for (const auto& [key, value] : ip.table.entries) {
        const auto& [cls, name, arity] = key;
        out << "  (" << cls << "," << name << "," << arity << ") -> " << value.first.render()
            << " | " << (value.second ? value.second->render() : "_") << "\n";
    }
    out << "}\n";
    out << "instrument-set {\n";
    for (const auto& sig : ip.set.methods) out << "  " << sig.render() << "\n";
    out << "}\n";
    return out.str();
}

InstrumentedProgram parse_instrumented(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string program_text;
    std::vector<std::string> table_lines, set_lines;
    int section = 0; // 0 program, 1 table, 2 set
    int lineno = 0;
    auto trim = [](const std::string& s) {
        size_t b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        size_t e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t == "reflection-table {") {
            section = 1;
            continue;
        }
        if (t == "instrument-set {") {
            section = 2;
            continue;
        }
        if (section != 0 && t == "}") {
            section = 0;
            continue;
        }
        if (section == 0) program_text += line + "\n";
        else if (section == 1 && !t.empty()) table_lines.push_back(t);
        else if (section == 2 && !t.empty()) set_lines.push_back(t);
    }

    InstrumentedProgram ip;
    ip.program = parse_program(program_text);
    for (const auto& t : table_lines) {
        size_t arrow = t.find(" -> ");
        if (arrow == std::string::npos || t.front() != '(')
            throw ParseError("bad reflection-table line: " + t);
        std::string key = t.substr(1, t.find(')') - 1);
        size_t c1 = key.find(',');
        size_t c2 = key.rfind(',');
        if (c1 == std::string::npos || c2 == c1)
            throw ParseError("bad reflection-table key: " + key);
        std::string cls = key.substr(0, c1);
        std::string name = key.substr(c1 + 1, c2 - c1 - 1);
        int arity = std::stoi(key.substr(c2 + 1));
        std::string rhs = t.substr(arrow + 4);
        size_t bar = rhs.find(" | ");
        if (bar == std::string::npos) throw ParseError("bad reflection-table entry: " + rhs);
        MethodSig orig = parse_sig(trim(rhs.substr(0, bar)));
        std::string mangled_text = trim(rhs.substr(bar + 3));
        std::optional<MethodSig> mangled;
        if (mangled_text != "_") mangled = parse_sig(mangled_text);
        ip.table.entries.emplace(ReflectionTable::Key{cls, name, arity},
                                 std::make_pair(std::move(orig), std::move(mangled)));
    }
    for (const auto& t : set_lines) ip.set.methods.insert(parse_sig(t));
    return ip;
}

} // namespace taintweave
