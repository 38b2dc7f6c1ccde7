#include "support/gen.hpp"

#include "taintweave/builtins.hpp"

namespace taintweave::testgen {

namespace {

int pick(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}
bool chance(Rng& rng, double p) {
    return std::uniform_real_distribution<double>(0, 1)(rng) < p;
}

template <typename T>
const T& choose(Rng& rng, const std::vector<T>& v) {
    return v[static_cast<size_t>(pick(rng, 0, static_cast<int>(v.size()) - 1))];
}

Instruction op_const(int dst, long long v) {
    Instruction i;
    i.op = Opcode::Const;
    i.dst = dst;
    i.literal = v;
    return i;
}

// ---- signatures ----

TypeDesc random_type(Rng& rng, bool allow_void_owner_classes = true) {
    switch (pick(rng, 0, 6)) {
    case 0: return TypeDesc::make_int();
    case 1: return TypeDesc::make_bool();
    case 2: return TypeDesc::make_array(TypeKind::Int, "", 1);
    case 3: return TypeDesc::make_array(TypeKind::Int, "", pick(rng, 2, 3));
    case 4: return TypeDesc::make_class("com.example.Obj");
    case 5: return TypeDesc::make_array(TypeKind::ClassRef, "util.Box$Inner", 1);
    default: return TypeDesc::make_class(allow_void_owner_classes ? "char" : "X");
    }
}

} // namespace

MethodSig random_sig(Rng& rng) {
    static const std::vector<std::string> owners = {
        "A", "pkg.B", "com.ibm.icu.util.ULocale$IDParser", "x.y.z.Worker",
        "Main", "util.Box$Inner", "a1.b2.C3"};
    static const std::vector<std::string> names = {
        "f", "get", "append", "run$inner", "compute", "m0", "toString"};
    MethodSig s;
    s.owner = choose(rng, owners);
    s.name = choose(rng, names);
    if (chance(rng, 0.7)) s.ret = random_type(rng);
    int nparams = pick(rng, 0, 4);
    for (int i = 0; i < nparams; ++i) s.params.push_back(random_type(rng));
    return s;
}

namespace {

// ---- programs ----

struct BodyGen {
    Rng& rng;
    const std::vector<ClassDef>& classes; // classes generated so far
    int nhelpers;                         // static helpers on Main
    MethodDef m;
    std::vector<int> int_regs, arr_regs;
    std::vector<std::pair<int, std::string>> obj_regs; // (reg, class)
    int next_reg;

    BodyGen(Rng& rng_, const std::vector<ClassDef>& cls, int nhelp, MethodSig sig, bool is_static)
        : rng(rng_), classes(cls), nhelpers(nhelp) {
        m.sig = std::move(sig);
        m.is_static = is_static;
        int argbase = is_static ? 0 : 1;
        if (!is_static) obj_regs.emplace_back(0, m.sig.owner);
        for (size_t i = 0; i < m.sig.params.size(); ++i) {
            const TypeDesc& t = m.sig.params[i];
            int r = argbase + static_cast<int>(i);
            if (t.is_primitive()) int_regs.push_back(r);
            else if (t.is_prim_array1()) arr_regs.push_back(r);
        }
        next_reg = argbase + static_cast<int>(m.sig.params.size());
    }

    int fresh() { return next_reg++; }

    void emit(Instruction i) { m.body.push_back(std::move(i)); }

    int ensure_int() {
        if (!int_regs.empty()) return choose(rng, int_regs);
        int r = fresh();
        emit(op_const(r, pick(rng, 0, 9)));
        int_regs.push_back(r);
        return r;
    }

    const ClassDef* find_up(const std::string& cls, const std::string& name) const {
        std::string cur = cls;
        while (true) {
            const ClassDef* cd = nullptr;
            for (const auto& c : classes)
                if (c.name == cur) cd = &c;
            if (!cd) return nullptr;
            for (const auto& mm : cd->methods)
                if (mm.sig.name == name) return cd;
            if (!cd->super) return nullptr;
            cur = *cd->super;
        }
    }

    void random_step(int helper_index) {
        switch (pick(rng, 0, 11)) {
        case 0: {
            int r = fresh();
            emit(op_const(r, pick(rng, -5, 20)));
            int_regs.push_back(r);
            break;
        }
        case 1: {
            if (int_regs.empty()) return;
            static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Or,
                                        BinOp::And, BinOp::Xor, BinOp::Lt,  BinOp::Eq};
            Instruction i;
            i.op = Opcode::Bin;
            i.bin_op = ops[pick(rng, 0, 7)];
            i.dst = fresh();
            i.regs = {ensure_int(), ensure_int()};
            int_regs.push_back(i.dst);
            emit(std::move(i));
            break;
        }
        case 2: {
            int len = fresh();
            emit(op_const(len, pick(rng, 2, 5)));
            Instruction i;
            i.op = Opcode::NewArr;
            i.dst = fresh();
            i.type = TypeDesc::make_int();
            i.regs = {len};
            arr_regs.push_back(i.dst);
            emit(std::move(i));
            break;
        }
        case 3: {
            if (arr_regs.empty()) return;
            int idx = fresh();
            emit(op_const(idx, pick(rng, 0, 1)));
            Instruction i;
            i.op = Opcode::AStore;
            i.regs = {choose(rng, arr_regs), idx, ensure_int()};
            i.type = TypeDesc::make_int();
            emit(std::move(i));
            break;
        }
        case 4: {
            if (arr_regs.empty()) return;
            int idx = fresh();
            emit(op_const(idx, pick(rng, 0, 1)));
            Instruction i;
            i.op = Opcode::ALoad;
            i.dst = fresh();
            i.regs = {choose(rng, arr_regs), idx};
            i.type = TypeDesc::make_int();
            int_regs.push_back(i.dst);
            emit(std::move(i));
            break;
        }
        case 5: {
            Instruction i;
            i.op = Opcode::SCall;
            i.dst = fresh();
            i.target = sig_in_read();
            int_regs.push_back(i.dst);
            emit(std::move(i));
            break;
        }
        case 6: {
            Instruction i;
            i.op = Opcode::SCall;
            i.target = chance(rng, 0.5) ? sig_out_write() : sig_out_print();
            i.regs = {ensure_int()};
            emit(std::move(i));
            break;
        }
        case 7: {
            if (classes.empty()) return;
            const ClassDef& c = choose(rng, classes);
            Instruction i;
            i.op = Opcode::New;
            i.dst = fresh();
            i.str = c.name;
            obj_regs.emplace_back(i.dst, c.name);
            emit(std::move(i));
            break;
        }
        case 8: {
            if (obj_regs.empty()) return;
            auto [reg, cls] = choose(rng, obj_regs);
            const ClassDef* owner = find_up(cls, "f");
            if (!owner) return;
            Instruction i;
            i.op = Opcode::VCall;
            i.dst = fresh();
            i.target = MethodSig{owner->name, TypeDesc::make_int(), "f", {TypeDesc::make_int()}};
            i.regs = {reg, ensure_int()};
            int_regs.push_back(i.dst);
            emit(std::move(i));
            break;
        }
        case 9: {
            if (obj_regs.empty()) return;
            auto [reg, cls] = choose(rng, obj_regs);
            // classes always declare val:int
            Instruction put;
            put.op = Opcode::Put;
            put.str = cls + ".val";
            put.regs = {reg, ensure_int()};
            emit(std::move(put));
            Instruction get;
            get.op = Opcode::Get;
            get.dst = fresh();
            get.regs = {reg};
            get.str = cls + ".val";
            int_regs.push_back(get.dst);
            emit(std::move(get));
            break;
        }
        case 10: {
            // call a later static helper on Main (keeps the graph acyclic)
            if (helper_index < 0 || helper_index + 1 >= nhelpers) return;
            int j = pick(rng, helper_index + 1, nhelpers - 1);
            Instruction i;
            i.op = Opcode::SCall;
            i.dst = fresh();
            i.target = MethodSig{"Main", TypeDesc::make_int(), "h" + std::to_string(j),
                                 {TypeDesc::make_int()}};
            i.regs = {ensure_int()};
            int_regs.push_back(i.dst);
            emit(std::move(i));
            break;
        }
        default: {
            if (obj_regs.empty()) return;
            auto [reg, cls] = choose(rng, obj_regs);
            if (!find_up(cls, "f")) return;
            int name = fresh();
            Instruction sc;
            sc.op = Opcode::SConst;
            sc.dst = name;
            sc.str = "f";
            emit(std::move(sc));
            Instruction i;
            i.op = Opcode::DynCall;
            i.dst = chance(rng, 0.5) ? fresh() : -1;
            i.regs = {name, reg, ensure_int()};
            if (i.dst >= 0) int_regs.push_back(i.dst);
            emit(std::move(i));
            break;
        }
        }
    }

    void finish_branch_tail() {
        // cond ? write : print, with labels, then fall through to the ret
        int cond = ensure_int();
        Instruction br;
        br.op = Opcode::Br;
        br.regs = {cond};
        br.str = "LA";
        br.str2 = "LB";
        emit(std::move(br));
        m.labels["LA"] = static_cast<int>(m.body.size());
        Instruction w;
        w.op = Opcode::SCall;
        w.target = sig_out_print();
        w.regs = {cond};
        emit(std::move(w));
        Instruction j;
        j.op = Opcode::Jmp;
        j.str = "LE";
        emit(std::move(j));
        m.labels["LB"] = static_cast<int>(m.body.size());
        Instruction p;
        p.op = Opcode::SCall;
        p.target = sig_out_print();
        p.regs = {cond};
        emit(std::move(p));
        m.labels["LE"] = static_cast<int>(m.body.size());
    }

    MethodDef build(int helper_index, int steps) {
        for (int i = 0; i < steps; ++i) random_step(helper_index);
        if (chance(rng, 0.3)) finish_branch_tail();
        Instruction ret;
        ret.op = Opcode::Ret;
        if (m.sig.ret) {
            if (m.sig.ret->is_primitive()) ret.dst = ensure_int();
            else if (m.sig.ret->is_prim_array1()) {
                if (arr_regs.empty()) {
                    int len = fresh();
                    emit(op_const(len, 2));
                    Instruction na;
                    na.op = Opcode::NewArr;
                    na.dst = fresh();
                    na.type = TypeDesc::make_int();
                    na.regs = {len};
                    arr_regs.push_back(na.dst);
                    emit(std::move(na));
                }
                ret.dst = choose(rng, arr_regs);
            } else {
                // return a fresh object/array of the declared type
                if (m.sig.ret->kind == TypeKind::ClassRef) {
                    Instruction n;
                    n.op = Opcode::New;
                    n.dst = fresh();
                    n.str = m.sig.ret->class_name;
                    ret.dst = n.dst;
                    emit(std::move(n));
                } else {
                    int len = fresh();
                    emit(op_const(len, 2));
                    Instruction na;
                    na.op = Opcode::NewArr;
                    na.dst = fresh();
                    na.type = m.sig.ret->element();
                    na.regs = {len};
                    ret.dst = na.dst;
                    emit(std::move(na));
                }
            }
        }
        emit(std::move(ret));
        m.num_regs = next_reg;
        return std::move(m);
    }
};

MethodDef gen_method(Rng& rng, const std::vector<ClassDef>& classes, int nhelpers, MethodSig sig,
                     bool is_static, int helper_index = -1) {
    BodyGen g(rng, classes, nhelpers, std::move(sig), is_static);
    return g.build(helper_index, pick(rng, 2, 8));
}

} // namespace

Program random_program(Rng& rng) {
    Program p;
    int nclasses = pick(rng, 1, 3);
    for (int i = 0; i < nclasses; ++i) {
        ClassDef c;
        c.name = "C" + std::to_string(i);
        if (i > 0 && chance(rng, 0.4)) c.super = "C" + std::to_string(pick(rng, 0, i - 1));
        c.fields.emplace_back("val", TypeDesc::make_int());
        if (chance(rng, 0.4)) c.fields.emplace_back("buf", TypeDesc::make_array(TypeKind::Int, "", 1));
        bool super_has_f = c.super && [&] {
            std::string cur = *c.super;
            while (true) {
                const ClassDef* cd = nullptr;
                for (const auto& cc : p.classes)
                    if (cc.name == cur) cd = &cc;
                if (!cd) return false;
                for (const auto& mm : cd->methods)
                    if (mm.sig.name == "f") return true;
                if (!cd->super) return false;
                cur = *cd->super;
            }
        }();
        if (!c.super || chance(rng, 0.6) || super_has_f) {
            MethodSig f{c.name, TypeDesc::make_int(), "f", {TypeDesc::make_int()}};
            c.methods.push_back(gen_method(rng, p.classes, 0, std::move(f), false));
        }
        p.classes.push_back(std::move(c));
    }

    ClassDef main_cls;
    main_cls.name = "Main";
    int nhelpers = pick(rng, 1, 4);
    // declared up front so helper bodies can call later helpers
    std::vector<MethodSig> helper_sigs;
    for (int j = 0; j < nhelpers; ++j)
        helper_sigs.push_back(
            MethodSig{"Main", TypeDesc::make_int(), "h" + std::to_string(j), {TypeDesc::make_int()}});

    bool with_multidim = chance(rng, 0.3);
    if (with_multidim) {
        MethodDef mk;
        mk.sig = MethodSig{"Main", TypeDesc::make_array(TypeKind::Int, "", 2), "mk", {}};
        mk.is_static = true;
        mk.num_regs = 4;
        mk.body.push_back(op_const(0, 1));
        Instruction outer;
        outer.op = Opcode::NewArr;
        outer.dst = 1;
        outer.type = TypeDesc::make_array(TypeKind::Int, "", 1);
        outer.regs = {0};
        mk.body.push_back(std::move(outer));
        mk.body.push_back(op_const(2, 2));
        Instruction inner;
        inner.op = Opcode::NewArr;
        inner.dst = 3;
        inner.type = TypeDesc::make_int();
        inner.regs = {2};
        mk.body.push_back(std::move(inner));
        mk.body.push_back(op_const(2, 0));
        Instruction st;
        st.op = Opcode::AStore;
        st.regs = {1, 2, 3};
        st.type = TypeDesc::make_array(TypeKind::Int, "", 1);
        mk.body.push_back(std::move(st));
        Instruction ret;
        ret.op = Opcode::Ret;
        ret.dst = 1;
        mk.body.push_back(std::move(ret));
        main_cls.methods.push_back(std::move(mk));
    }

    for (int j = 0; j < nhelpers; ++j)
        main_cls.methods.push_back(
            gen_method(rng, p.classes, nhelpers, helper_sigs[j], true, j));

    // entry calls helper 0 and, when present, the multi-dim producer
    BodyGen mg(rng, p.classes, nhelpers, MethodSig{"Main", std::nullopt, "main", {}}, true);
    {
        int a = mg.fresh();
        mg.emit(op_const(a, pick(rng, 0, 9)));
        mg.int_regs.push_back(a);
        Instruction call;
        call.op = Opcode::SCall;
        call.dst = mg.fresh();
        call.target = helper_sigs[0];
        call.regs = {a};
        mg.int_regs.push_back(call.dst);
        mg.emit(std::move(call));
        if (with_multidim) {
            Instruction c2;
            c2.op = Opcode::SCall;
            c2.dst = mg.fresh();
            c2.target = MethodSig{"Main", TypeDesc::make_array(TypeKind::Int, "", 2), "mk", {}};
            mg.emit(std::move(c2));
        }
    }
    main_cls.methods.push_back(mg.build(-1, pick(rng, 1, 5)));
    p.classes.push_back(std::move(main_cls));
    p.entry = MethodSig{"Main", std::nullopt, "main", {}};
    return p;
}

} // namespace taintweave::testgen
