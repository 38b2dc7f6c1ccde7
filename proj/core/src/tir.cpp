#include "taintweave/tir.hpp"

namespace taintweave {

namespace {

struct OpName {
    Opcode op;
    const char* name;
};

constexpr OpName kOpNames[] = {
    {Opcode::Const, "const"},   {Opcode::SConst, "sconst"}, {Opcode::Move, "move"},
    {Opcode::Bin, "bin"},       {Opcode::New, "new"},       {Opcode::NewArr, "newarr"},
    {Opcode::ALoad, "aload"},   {Opcode::AStore, "astore"}, {Opcode::Get, "get"},
    {Opcode::Put, "put"},       {Opcode::SCall, "scall"},   {Opcode::VCall, "vcall"},
    {Opcode::DynCall, "dyncall"}, {Opcode::Ret, "ret"},     {Opcode::Jmp, "jmp"},
    {Opcode::Br, "br"},
};

struct BinName {
    BinOp op;
    const char* name;
};

constexpr BinName kBinNames[] = {
    {BinOp::Add, "add"}, {BinOp::Sub, "sub"}, {BinOp::Mul, "mul"},
    {BinOp::Div, "div"}, {BinOp::Or, "or"},   {BinOp::And, "and"},
    {BinOp::Xor, "xor"}, {BinOp::Lt, "lt"},   {BinOp::Eq, "eq"},
};

} // namespace

const char* opcode_name(Opcode op) {
    for (const auto& e : kOpNames)
        if (e.op == op) return e.name;
    return "?";
}

const char* binop_name(BinOp op) {
    for (const auto& e : kBinNames)
        if (e.op == op) return e.name;
    return "?";
}

std::optional<Opcode> opcode_from_name(std::string_view name) {
    for (const auto& e : kOpNames)
        if (name == e.name) return e.op;
    return std::nullopt;
}

std::optional<BinOp> binop_from_name(std::string_view name) {
    for (const auto& e : kBinNames)
        if (name == e.name) return e.op;
    return std::nullopt;
}

const MethodDef* ClassDef::find_method(const std::string& name_,
                                       const std::vector<TypeDesc>& params) const {
    for (const auto& m : methods)
        if (m.sig.name == name_ && m.sig.params == params) return &m;
    return nullptr;
}

const TypeDesc* ClassDef::find_field(const std::string& field) const {
    for (const auto& [n, t] : fields)
        if (n == field) return &t;
    return nullptr;
}

const ClassDef* Program::find_class(const std::string& name) const {
    for (const auto& c : classes)
        if (c.name == name) return &c;
    return nullptr;
}

ClassDef* Program::find_class(const std::string& name) {
    for (auto& c : classes)
        if (c.name == name) return &c;
    return nullptr;
}

const MethodDef* Program::find_method(const MethodSig& sig) const {
    const ClassDef* c = find_class(sig.owner);
    if (!c) return nullptr;
    for (const auto& m : c->methods)
        if (m.sig == sig) return &m;
    return nullptr;
}

std::vector<MethodSig> Program::all_method_sigs() const {
    std::vector<MethodSig> out;
    for (const auto& c : classes)
        for (const auto& m : c.methods) out.push_back(m.sig);
    return out;
}

std::pair<std::string, std::string> split_field_ref(const std::string& qualified) {
    size_t dot = qualified.rfind('.');
    if (dot == std::string::npos) return {"", qualified};
    return {qualified.substr(0, dot), qualified.substr(dot + 1)};
}

} // namespace taintweave
