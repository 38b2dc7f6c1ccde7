#include "taintweave/vm.hpp"

#include "taintweave/builtins.hpp"
#include "taintweave/resolve.hpp"

#include <json.hpp>

namespace taintweave {

namespace {

struct RunErrorEx {
    std::string message;
};
struct BudgetEx {};

struct Value {
    enum class Kind { Int, Ref, Null, Str };
    Kind kind = Kind::Int;
    long long i = 0;
    int ref = -1;
    std::string s;

    static Value of_int(long long v) { return {Kind::Int, v, -1, {}}; }
    static Value of_ref(int r) { return {Kind::Ref, 0, r, {}}; }
    static Value null() { return {Kind::Null, 0, -1, {}}; }
    static Value of_str(std::string v) { return {Kind::Str, 0, -1, std::move(v)}; }
};

struct HeapObject {
    bool is_array = false;
    // objects
    std::string class_name;
    std::map<std::string, Value> fields;
    // arrays
    TypeDesc elem;
    std::vector<Value> slots;
};

Value default_for(const TypeDesc& t) {
    return t.is_primitive() ? Value::of_int(0) : Value::null();
}

MethodSig mangled_of(const MethodSig& s) { return *transform_signature(s).mangled; }

struct Interp {
    const Program& p;
    const ReflectionTable& table;
    const InstrumentSet& set;
    const RunConfig& cfg;

    std::vector<HeapObject> heap;
    std::vector<long long> output;
    std::vector<ViolationRecord> violations;
    std::vector<CallEdge> trace;
    std::vector<MethodSig> stack;
    long long executed = 0;
    long long sink_ordinal = 0;
    size_t input_cursor = 0;

    static constexpr int kMaxDepth = 10000;

    [[noreturn]] void fail(std::string msg) { throw RunErrorEx{std::move(msg)}; }

    void tick() {
        if (++executed > cfg.instruction_budget) throw BudgetEx{};
    }

    bool frame_instrumented(const MethodSig& sig) const {
        return set.contains(sig) || sig.name.find(kMangleSuffix) != std::string::npos;
    }

    long long next_input() {
        // past-the-end reads yield 0 so corpus programs stay total
        if (input_cursor >= cfg.input_values.size()) return 0;
        return cfg.input_values[input_cursor++];
    }

    std::uint64_t source_mask(const MethodSig& seed) const {
        auto bit = cfg.seeds.source_label_bit(seed);
        return bit ? (std::uint64_t{1} << *bit) : 0;
    }

    bool is_sink_seed(const MethodSig& sig) const {
        for (const auto& s : cfg.seeds.sink_seeds)
            if (s == sig) return true;
        return false;
    }

    long long as_int(const Value& v, const char* what) {
        if (v.kind != Value::Kind::Int) fail(std::string("type mismatch: ") + what + " is not an int");
        return v.i;
    }
    HeapObject& as_object(const Value& v, const std::string& what) {
        if (v.kind == Value::Kind::Null) fail("null dereference at " + what);
        if (v.kind != Value::Kind::Ref || heap[v.ref].is_array)
            fail("type mismatch: " + what + " is not an object");
        return heap[v.ref];
    }
    HeapObject& as_array(const Value& v, const char* what) {
        if (v.kind == Value::Kind::Null) fail(std::string("null dereference at ") + what);
        if (v.kind != Value::Kind::Ref || !heap[v.ref].is_array)
            fail(std::string("type mismatch: ") + what + " is not an array");
        return heap[v.ref];
    }

    int alloc_object(const std::string& cls) {
        HeapObject obj;
        obj.class_name = cls;
        std::string cur = cls;
        while (const ClassDef* cd = lookup_class(p, cur)) {
            for (const auto& [fname, ftype] : cd->fields)
                obj.fields.emplace(fname, default_for(ftype));
            if (!cd->super) break;
            cur = *cd->super;
        }
        heap.push_back(std::move(obj));
        return static_cast<int>(heap.size()) - 1;
    }

    int alloc_array(const TypeDesc& elem, long long len) {
        if (len < 0) fail("negative array length");
        HeapObject arr;
        arr.is_array = true;
        arr.elem = elem;
        arr.slots.assign(static_cast<size_t>(len), default_for(elem));
        heap.push_back(std::move(arr));
        return static_cast<int>(heap.size()) - 1;
    }

    int make_box(const std::string& cls, long long val, std::uint64_t taint) {
        int r = alloc_object(cls);
        heap[r].fields["val"] = Value::of_int(val);
        heap[r].fields["taint"] = Value::of_int(static_cast<long long>(taint));
        return r;
    }

    void record_sink(const MethodSig& sink, long long value, std::uint64_t mask, bool taint_aware) {
        output.push_back(value);
        if (!is_sink_seed(sink)) return;
        ++sink_ordinal;
        if (taint_aware && mask != 0)
            violations.push_back({sink, mask, sink_ordinal, stack});
    }

    // A shadow value for a result obtained without taint information.
    Value default_shadow(const Value& result, const std::optional<TypeDesc>& ret) {
        if (ret && ret->is_prim_array1() && result.kind == Value::Kind::Ref)
            return Value::of_ref(alloc_array(TypeDesc::make_int(), heap[result.ref].slots.size()));
        return Value::of_int(0);
    }

    std::optional<Value> intrinsic(const MethodSig& target, std::vector<Value>& args) {
        static const MethodSig read_t = mangled_of(sig_in_read());
        static const MethodSig readbuf_t = mangled_of(sig_in_readbuf());
        static const MethodSig write_t = mangled_of(sig_out_write());
        static const MethodSig print_t = mangled_of(sig_out_print());
        static const MethodSig exec_t = mangled_of(sig_sys_exec());
        static const MethodSig map_t = mangled_of(sig_hof_map());
        static const MethodSig apply_t = mangled_of(sig_fn_apply());

        if (target == sig_in_read()) return Value::of_int(next_input());
        if (target == read_t)
            return Value::of_ref(make_box(kTaintedInt, next_input(), source_mask(sig_in_read())));
        if (target == sig_in_readbuf()) {
            HeapObject& arr = as_array(args[0], "readBuf buffer");
            for (auto& slot : arr.slots) slot = Value::of_int(next_input());
            return std::nullopt;
        }
        if (target == readbuf_t) {
            std::uint64_t mask = source_mask(sig_in_readbuf());
            {
                HeapObject& arr = as_array(args[0], "readBuf buffer");
                for (auto& slot : arr.slots) slot = Value::of_int(next_input());
            }
            HeapObject& shadow = as_array(args[1], "readBuf shadow");
            for (auto& slot : shadow.slots) slot = Value::of_int(static_cast<long long>(mask));
            return std::nullopt;
        }
        if (target == sig_out_write()) {
            record_sink(sig_out_write(), as_int(args[0], "write arg"), 0, false);
            return std::nullopt;
        }
        if (target == write_t) {
            record_sink(sig_out_write(), as_int(args[0], "write arg"),
                        static_cast<std::uint64_t>(as_int(args[1], "write taint")), true);
            return std::nullopt;
        }
        if (target == sig_sys_exec()) {
            record_sink(sig_sys_exec(), as_int(args[0], "exec arg"), 0, false);
            return std::nullopt;
        }
        if (target == exec_t) {
            record_sink(sig_sys_exec(), as_int(args[0], "exec arg"),
                        static_cast<std::uint64_t>(as_int(args[1], "exec taint")), true);
            return std::nullopt;
        }
        if (target == sig_out_print() || target == print_t) {
            output.push_back(as_int(args[0], "print arg"));
            return std::nullopt;
        }
        if (target == sig_hof_map()) return hof_map(args[0], args[1], std::nullopt);
        if (target == map_t) return hof_map(args[0], args[1], args[2]);
        if (target == sig_fn_apply()) return args[1]; // base Fn: identity
        if (target == apply_t) {
            return Value::of_ref(make_box(kTaintedInt, as_int(args[1], "apply arg"),
                                          static_cast<std::uint64_t>(as_int(args[2], "apply taint"))));
        }
        if (target == sig_arr_zeroslike()) {
            HeapObject& arr = as_array(args[0], "zeroslike arg");
            return Value::of_ref(alloc_array(TypeDesc::make_int(), arr.slots.size()));
        }
        if (target == sig_arr_lift2()) {
            size_t n = as_array(args[0], "lift2 arg").slots.size();
            int out = alloc_array(TypeDesc::make_class(kTaintedIntArray), static_cast<long long>(n));
            for (size_t i = 0; i < n; ++i) {
                Value inner = heap[args[0].ref].slots[i];
                if (inner.kind == Value::Kind::Null) continue;
                size_t len = as_array(inner, "lift2 row").slots.size();
                int box = alloc_object(kTaintedIntArray);
                heap[box].fields["arr"] = inner;
                heap[box].fields["taintArr"] =
                    Value::of_ref(alloc_array(TypeDesc::make_int(), static_cast<long long>(len)));
                heap[out].slots[i] = Value::of_ref(box);
            }
            return Value::of_ref(out);
        }
        if (target == sig_arr_unlift2()) {
            size_t n = as_array(args[0], "unlift2 arg").slots.size();
            int out = alloc_array(TypeDesc::make_array(TypeKind::Int, "", 1),
                                  static_cast<long long>(n));
            for (size_t i = 0; i < n; ++i) {
                Value box = heap[args[0].ref].slots[i];
                if (box.kind == Value::Kind::Null) continue;
                heap[out].slots[i] = as_object(box, "unlift2 box").fields.at("arr");
            }
            return Value::of_ref(out);
        }
        fail("unknown intrinsic " + target.render());
    }

    // stdlib.Hof.map: the library is "fully instrumented" — it invokes the
    // taint-aware apply when the receiver's class provides one.
    std::optional<Value> hof_map(const Value& fn, const Value& x, std::optional<Value> tx) {
        HeapObject& recv = as_object(fn, "map receiver");
        const std::string& cls = recv.class_name;
        if (tx) {
            ResolvedMethod rm = resolve_method(p, cls, sig_fn_apply().name + kMangleSuffix,
                                               mangled_of(sig_fn_apply()).params);
            if (rm.method && !rm.method->body.empty()) {
                std::vector<Value> args{fn, x, *tx};
                return exec_body(*rm.method, args);
            }
            // no instrumented override: plain apply, taint dropped
            Value r = call_apply_plain(fn, x);
            return Value::of_ref(make_box(kTaintedInt, as_int(r, "apply result"), 0));
        }
        return call_apply_plain(fn, x);
    }

    Value call_apply_plain(const Value& fn, const Value& x) {
        HeapObject& recv = as_object(fn, "map receiver");
        ResolvedMethod rm = resolve_method(p, recv.class_name, sig_fn_apply().name,
                                           sig_fn_apply().params);
        if (rm.method && !rm.method->body.empty()) {
            std::vector<Value> args{fn, x};
            auto r = exec_body(*rm.method, args);
            if (!r) fail("apply returned no value");
            return *r;
        }
        return x; // base stdlib.Fn identity
    }

    std::optional<Value> invoke_static(const MethodSig& target, std::vector<Value> args) {
        if (is_builtin_owner(target)) return intrinsic(target, args);
        ResolvedMethod rm = resolve_method(p, target);
        if (!rm.method || rm.method->body.empty())
            fail("unresolved call target " + target.render());
        return exec_body(*rm.method, args);
    }

    std::optional<Value> invoke_virtual(const MethodSig& target, std::vector<Value> args) {
        HeapObject& recv = as_object(args[0], "receiver of " + target.name);
        std::string cur = recv.class_name;
        while (true) {
            const ClassDef* cd = lookup_class(p, cur);
            if (!cd) fail("receiver of unknown class " + cur);
            if (const MethodDef* m = cd->find_method(target.name, target.params)) {
                if (m->body.empty() && is_builtin_class(cd->name)) {
                    std::vector<Value> a = args;
                    return intrinsic(m->sig, a);
                }
                if (m->body.empty()) fail("call to bodiless method " + m->sig.render());
                return exec_body(*m, std::move(args));
            }
            if (!cd->super) break;
            cur = *cd->super;
        }
        // A mangled call can dispatch onto an uninstrumented override; fall
        // back to the original method with plain values and default taints.
        if (target.name.find(kMangleSuffix) != std::string::npos) {
            cur = recv.class_name;
            while (const ClassDef* cd = lookup_class(p, cur)) {
                for (const auto& m : cd->methods) {
                    SignatureTransform tr = transform_signature(m.sig);
                    if (!tr.changed() || tr.mangled->name != target.name ||
                        tr.mangled->params != target.params)
                        continue;
                    std::vector<Value> plain(args.begin(),
                                             args.begin() + 1 + m.sig.params.size());
                    auto r = exec_body(m, std::move(plain));
                    if (tr.boxed_return) {
                        if (!r) fail("missing return from " + m.sig.render());
                        std::string box = target.ret->class_name;
                        return Value::of_ref(make_box(box, as_int(*r, "boxed return"), 0));
                    }
                    return r;
                }
                if (!cd->super) break;
                cur = *cd->super;
            }
        }
        fail("unresolved virtual call " + target.render() + " on " + recv.class_name);
    }

    void check_boundary_purity(const MethodDef& m, const std::vector<Value>& args) {
        if (frame_instrumented(m.sig)) return;
        for (const Value& v : args) {
            if (v.kind != Value::Kind::Ref) continue;
            const HeapObject& o = heap[v.ref];
            if (!o.is_array && (o.class_name == kTaintedInt || o.class_name == kTaintedBool))
                fail("boundary purity violated: box value passed to " + m.sig.render());
        }
    }

    std::optional<Value> exec_body(const MethodDef& m, std::vector<Value> args) {
        if (static_cast<int>(stack.size()) >= kMaxDepth) fail("call depth exceeded");
        check_boundary_purity(m, args);
        stack.push_back(m.sig);
        std::vector<Value> regs(static_cast<size_t>(m.num_regs), Value::of_int(0));
        for (size_t i = 0; i < args.size() && i < regs.size(); ++i) regs[i] = std::move(args[i]);

        std::optional<Value> result;
        size_t pc = 0;
        while (pc < m.body.size()) {
            const Instruction& ins = m.body[pc];
            tick();
            ++pc;
            switch (ins.op) {
            case Opcode::Const:
                regs[ins.dst] = Value::of_int(ins.literal);
                break;
            case Opcode::SConst:
                regs[ins.dst] = Value::of_str(ins.str);
                break;
            case Opcode::Move:
                regs[ins.dst] = regs[ins.regs[0]];
                break;
            case Opcode::Bin: {
                long long a = as_int(regs[ins.regs[0]], "bin lhs");
                long long b = as_int(regs[ins.regs[1]], "bin rhs");
                long long r = 0;
                switch (ins.bin_op) {
                case BinOp::Add: r = a + b; break;
                case BinOp::Sub: r = a - b; break;
                case BinOp::Mul: r = a * b; break;
                case BinOp::Div:
                    if (b == 0) fail("division by zero");
                    r = a / b;
                    break;
                case BinOp::Or: r = a | b; break;
                case BinOp::And: r = a & b; break;
                case BinOp::Xor: r = a ^ b; break;
                case BinOp::Lt: r = a < b ? 1 : 0; break;
                case BinOp::Eq: r = a == b ? 1 : 0; break;
                }
                regs[ins.dst] = Value::of_int(r);
                break;
            }
            case Opcode::New:
                regs[ins.dst] = Value::of_ref(alloc_object(ins.str));
                break;
            case Opcode::NewArr:
                regs[ins.dst] =
                    Value::of_ref(alloc_array(*ins.type, as_int(regs[ins.regs[0]], "array length")));
                break;
            case Opcode::ALoad: {
                HeapObject& arr = as_array(regs[ins.regs[0]], "aload array");
                if (arr.elem != *ins.type)
                    fail("array element type mismatch: aload expects " + ins.type->render() +
                         ", array holds " + arr.elem.render());
                long long idx = as_int(regs[ins.regs[1]], "aload index");
                if (idx < 0 || idx >= static_cast<long long>(arr.slots.size()))
                    fail("array index out of bounds: " + std::to_string(idx));
                regs[ins.dst] = arr.slots[static_cast<size_t>(idx)];
                break;
            }
            case Opcode::AStore: {
                HeapObject& arr = as_array(regs[ins.regs[0]], "astore array");
                if (arr.elem != *ins.type)
                    fail("array element type mismatch: astore expects " + ins.type->render() +
                         ", array holds " + arr.elem.render());
                long long idx = as_int(regs[ins.regs[1]], "astore index");
                if (idx < 0 || idx >= static_cast<long long>(arr.slots.size()))
                    fail("array index out of bounds: " + std::to_string(idx));
                arr.slots[static_cast<size_t>(idx)] = regs[ins.regs[2]];
                break;
            }
            case Opcode::Get: {
                HeapObject& obj = as_object(regs[ins.regs[0]], ins.str.c_str());
                auto [cls, field] = split_field_ref(ins.str);
                auto it = obj.fields.find(field);
                if (it == obj.fields.end()) fail("no field '" + field + "' on " + obj.class_name);
                regs[ins.dst] = it->second;
                break;
            }
            case Opcode::Put: {
                HeapObject& obj = as_object(regs[ins.regs[0]], ins.str.c_str());
                auto [cls, field] = split_field_ref(ins.str);
                auto it = obj.fields.find(field);
                if (it == obj.fields.end()) fail("no field '" + field + "' on " + obj.class_name);
                it->second = regs[ins.regs[1]];
                break;
            }
            case Opcode::SCall:
            case Opcode::VCall: {
                std::vector<Value> cargs;
                cargs.reserve(ins.regs.size());
                for (int r : ins.regs) cargs.push_back(regs[r]);
                if (cfg.trace_calls) trace.emplace_back(m.sig, *ins.target);
                auto r = ins.op == Opcode::SCall ? invoke_static(*ins.target, std::move(cargs))
                                                 : invoke_virtual(*ins.target, std::move(cargs));
                if (ins.dst >= 0) {
                    if (!r) fail("void call result used: " + ins.target->render());
                    regs[ins.dst] = *r;
                }
                break;
            }
            case Opcode::DynCall:
                exec_dyncall(m, ins, regs);
                break;
            case Opcode::Ret:
                if (ins.dst >= 0) result = regs[ins.dst];
                stack.pop_back();
                return result;
            case Opcode::Jmp:
                pc = static_cast<size_t>(m.labels.at(ins.str));
                break;
            case Opcode::Br:
                pc = as_int(regs[ins.regs[0]], "br condition") != 0
                         ? static_cast<size_t>(m.labels.at(ins.str))
                         : static_cast<size_t>(m.labels.at(ins.str2));
                break;
            }
        }
        fail("control fell off the end of " + m.sig.render());
    }

    void exec_dyncall(const MethodDef& frame, const Instruction& ins, std::vector<Value>& regs) {
        bool inst = frame_instrumented(frame.sig);
        int total = static_cast<int>(ins.regs.size());
        int n = inst ? (ins.dst >= 0 ? (total - 3) / 2 : (total - 2) / 2) : total - 2;

        const Value& name_v = regs[ins.regs[0]];
        if (name_v.kind != Value::Kind::Str) fail("dyncall name register is not a string");
        HeapObject& recv = as_object(regs[ins.regs[1]], "dyncall receiver");

        // find the table entry along the receiver's class chain
        const std::pair<MethodSig, std::optional<MethodSig>>* entry = nullptr;
        std::string cur = recv.class_name;
        while (true) {
            auto it = table.entries.find(ReflectionTable::Key{cur, name_v.s, n});
            if (it != table.entries.end()) {
                entry = &it->second;
                break;
            }
            const ClassDef* cd = lookup_class(p, cur);
            if (!cd || !cd->super) break;
            cur = *cd->super;
        }
        if (!entry)
            fail("unresolvable dyncall: no method '" + name_v.s + "' with arity " +
                 std::to_string(n) + " on " + recv.class_name);
        if (cfg.trace_calls) trace.emplace_back(frame.sig, entry->first);

        std::vector<Value> args;
        args.push_back(regs[ins.regs[1]]);
        for (int j = 0; j < n; ++j) args.push_back(regs[ins.regs[2 + j]]);

        if (inst && entry->second) {
            SignatureTransform tr = transform_signature(entry->first);
            for (size_t i = 0; i < entry->first.params.size(); ++i)
                if (tr.shadow_param_map[i]) args.push_back(regs[ins.regs[2 + n + i]]);
            auto r = invoke_virtual(*entry->second, std::move(args));
            if (ins.dst < 0) return;
            int sh_dst = ins.regs.back();
            if (tr.boxed_return) {
                if (!r) fail("missing boxed return from " + entry->second->render());
                HeapObject& box = as_object(*r, "boxed return");
                regs[ins.dst] = box.fields.at("val");
                regs[sh_dst] = box.fields.at("taint");
            } else {
                if (!r) fail("void dyncall result used: " + entry->first.render());
                regs[sh_dst] = default_shadow(*r, tr.mangled->ret);
                regs[ins.dst] = *r;
            }
            return;
        }

        auto r = invoke_virtual(entry->first, std::move(args));
        if (ins.dst >= 0) {
            if (!r) fail("void dyncall result used: " + entry->first.render());
            if (inst) regs[ins.regs.back()] = default_shadow(*r, entry->first.ret);
            regs[ins.dst] = *r;
        }
    }
};

} // namespace

std::optional<MethodSig> dispatch_dynamic(const ReflectionTable& table, const Program& p,
                                          const std::string& name, const std::string& recv_class,
                                          int arity, bool caller_in_set) {
    std::string cur = recv_class;
    while (true) {
        auto it = table.entries.find(ReflectionTable::Key{cur, name, arity});
        if (it != table.entries.end()) {
            if (caller_in_set && it->second.second) return it->second.second;
            return it->second.first;
        }
        const ClassDef* cd = lookup_class(p, cur);
        if (!cd || !cd->super) return std::nullopt;
        cur = *cd->super;
    }
}

RunReport run(const InstrumentedProgram& ip, const RunConfig& cfg) {
    ReflectionTable rebuilt;
    const ReflectionTable* table = &ip.table;
    if (ip.table.entries.empty()) {
        rebuilt = build_reflection_table(ip.program, ip.set);
        table = &rebuilt;
    }

    Interp vm{ip.program, *table, ip.set, cfg, {}, {}, {}, {}, {}, 0, 0, 0};
    RunReport report;
    try {
        if (!ip.program.entry) throw RunErrorEx{"program has no entry method"};
        ResolvedMethod entry = resolve_method(ip.program, *ip.program.entry);
        if (!entry.method) throw RunErrorEx{"entry method not found"};
        vm.exec_body(*entry.method, {});
        report.halted = HaltKind::Normal;
    } catch (const RunErrorEx& e) {
        report.halted = HaltKind::RunError;
        report.error = e.message;
    } catch (const BudgetEx&) {
        report.halted = HaltKind::BudgetExceeded;
    }
    report.printed_output = std::move(vm.output);
    report.violations = std::move(vm.violations);
    report.executed_instructions = vm.executed;
    report.call_trace = std::move(vm.trace);
    return report;
}

RunReport run(const Program& p, const RunConfig& cfg) {
    InstrumentedProgram ip;
    ip.program = p;
    return run(ip, cfg);
}

bool RunReport::detection_equal(const RunReport& o) const {
    if (violations.size() != o.violations.size()) return false;
    for (size_t i = 0; i < violations.size(); ++i)
        if (!violations[i].same_violation(o.violations[i])) return false;
    return true;
}

std::string RunReport::to_json() const {
    nlohmann::ordered_json j;
    j["output"] = printed_output;
    j["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : violations) {
        nlohmann::ordered_json jv;
        jv["sink"] = v.sink.render();
        jv["mask"] = v.mask;
        jv["ordinal"] = v.ordinal;
        j["violations"].push_back(std::move(jv));
    }
    j["instructions"] = executed_instructions;
    switch (halted) {
    case HaltKind::Normal: j["halted"] = "normal"; break;
    case HaltKind::BudgetExceeded: j["halted"] = "budget-exceeded"; break;
    case HaltKind::RunError:
        j["halted"] = "run-error";
        j["error"] = error;
        break;
    }
    return j.dump(2) + "\n";
}

} // namespace taintweave
