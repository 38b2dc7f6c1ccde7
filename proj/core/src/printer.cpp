#include "taintweave/printer.hpp"

#include <sstream>

namespace taintweave {

std::string emit_instruction(const Instruction& ins) {
    std::ostringstream out;
    out << opcode_name(ins.op);
    auto reg = [](int r) { return "r" + std::to_string(r); };
    switch (ins.op) {
    case Opcode::Const:
        out << " " << reg(ins.dst) << ", " << ins.literal;
        break;
    case Opcode::SConst:
        out << " " << reg(ins.dst) << ", \"" << ins.str << "\"";
        break;
    case Opcode::Move:
        out << " " << reg(ins.dst) << ", " << reg(ins.regs[0]);
        break;
    case Opcode::Bin:
        out << " " << binop_name(ins.bin_op) << ", " << reg(ins.dst) << ", " << reg(ins.regs[0])
            << ", " << reg(ins.regs[1]);
        break;
    case Opcode::New:
        out << " " << reg(ins.dst) << ", " << ins.str;
        break;
    case Opcode::NewArr:
        out << " " << reg(ins.dst) << ", " << ins.type->render() << ", " << reg(ins.regs[0]);
        break;
    case Opcode::ALoad:
        out << " " << reg(ins.dst) << ", " << reg(ins.regs[0]) << ", " << reg(ins.regs[1]) << ", "
            << ins.type->render();
        break;
    case Opcode::AStore:
        out << " " << reg(ins.regs[0]) << ", " << reg(ins.regs[1]) << ", " << reg(ins.regs[2])
            << ", " << ins.type->render();
        break;
    case Opcode::Get:
        out << " " << reg(ins.dst) << ", " << reg(ins.regs[0]) << ", " << ins.str;
        break;
    case Opcode::Put:
        out << " " << reg(ins.regs[0]) << ", " << ins.str << ", " << reg(ins.regs[1]);
        break;
    case Opcode::SCall:
    case Opcode::VCall: {
        out << " ";
        if (ins.dst >= 0) out << reg(ins.dst) << ", ";
        out << ins.target->render();
        for (int r : ins.regs) out << ", " << reg(r);
        break;
    }
    case Opcode::DynCall: {
        out << " " << (ins.dst >= 0 ? reg(ins.dst) : std::string("_"));
        for (int r : ins.regs) out << ", " << reg(r);
        break;
    }
    case Opcode::Ret:
        if (ins.dst >= 0) out << " " << reg(ins.dst);
        break;
    case Opcode::Jmp:
        out << " " << ins.str;
        break;
    case Opcode::Br:
        out << " " << reg(ins.regs[0]) << ", " << ins.str << ", " << ins.str2;
        break;
    }
    return out.str();
}

std::string emit_program(const Program& p) {
    std::ostringstream out;
    for (const auto& c : p.classes) {
        out << "class " << c.name;
        if (c.super) out << " extends " << *c.super;
        out << " {\n";
        for (const auto& [fname, ftype] : c.fields)
            out << "  field " << fname << " : " << ftype.render() << "\n";
        for (const auto& m : c.methods) {
            out << "  method " << (m.is_static ? "static " : "") << m.sig.render() << " regs "
                << m.num_regs << " {\n";
            // labels keyed by instruction index; a label may sit past the end
            for (size_t i = 0; i <= m.body.size(); ++i) {
                for (const auto& [label, idx] : m.labels)
                    if (idx == static_cast<int>(i)) out << "  " << label << ":\n";
                if (i < m.body.size()) out << "    " << emit_instruction(m.body[i]) << "\n";
            }
            out << "  }\n";
        }
        out << "}\n";
    }
    if (p.entry) out << "entry " << p.entry->render() << "\n";
    return out.str();
}

} // namespace taintweave
