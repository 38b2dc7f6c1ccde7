#pragma once

#include "taintweave/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace taintweave {

enum class Opcode {
    Const,
    SConst,
    Move,
    Bin,
    New,
    NewArr,
    ALoad,
    AStore,
    Get,
    Put,
    SCall,
    VCall,
    DynCall,
    Ret,
    Jmp,
    Br
};

enum class BinOp { Add, Sub, Mul, Div, Or, And, Xor, Lt, Eq };

const char* opcode_name(Opcode op);
const char* binop_name(BinOp op);
std::optional<Opcode> opcode_from_name(std::string_view name);
std::optional<BinOp> binop_from_name(std::string_view name);

// One register-machine instruction. Operand roles by opcode:
//   const   dst, literal
//   sconst  dst, str (quoted literal)
//   move    dst, regs[0]
//   bin     binop, dst, regs[0], regs[1]
//   new     dst, str (class name)
//   newarr  dst, type (element type), regs[0] (length)
//   aload   dst, regs[0] (array), regs[1] (index), type (element type)
//   astore  regs[0] (array), regs[1] (index), regs[2] (source), type
//   get     dst, regs[0] (object), str ("Class.field")
//   put     regs[0] (object), str, regs[1] (source)
//   scall   dst (-1 for void), target, regs (args)
//   vcall   dst (-1 for void), target, regs (receiver then args)
//   dyncall dst (-1 = `_`), regs[0] (name reg), regs[1] (receiver), rest args
//   ret     dst (-1 for void return, else value reg)
//   jmp     str (label)
//   br      regs[0] (condition), str (label if nonzero), str2 (label if zero)
struct Instruction {
    Opcode op = Opcode::Ret;
    BinOp bin_op = BinOp::Add;
    int dst = -1;
    std::vector<int> regs;
    long long literal = 0;
    std::string str;
    std::string str2;
    std::optional<MethodSig> target;
    std::optional<TypeDesc> type;

    auto operator<=>(const Instruction&) const = default;
};

struct MethodDef {
    MethodSig sig;
    bool is_static = false; // static methods take no receiver; scall-only targets
    int num_regs = 0;
    std::vector<Instruction> body;
    std::map<std::string, int> labels; // label -> instruction index

    auto operator<=>(const MethodDef&) const = default;
};

struct ClassDef {
    std::string name;
    std::optional<std::string> super;
    std::vector<std::pair<std::string, TypeDesc>> fields;
    std::vector<MethodDef> methods;

    auto operator<=>(const ClassDef&) const = default;

    const MethodDef* find_method(const std::string& name_, const std::vector<TypeDesc>& params) const;
    const TypeDesc* find_field(const std::string& field) const;
};

struct Program {
    std::vector<ClassDef> classes;
    std::optional<MethodSig> entry;

    auto operator<=>(const Program&) const = default;

    const ClassDef* find_class(const std::string& name) const;
    ClassDef* find_class(const std::string& name);
    const MethodDef* find_method(const MethodSig& sig) const;
    std::vector<MethodSig> all_method_sigs() const;
};

// Splits a qualified "Class.field" operand at its last dot.
std::pair<std::string, std::string> split_field_ref(const std::string& qualified);

} // namespace taintweave
