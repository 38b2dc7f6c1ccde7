#include "taintweave/parser.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace taintweave {

namespace {

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Splits an operand list at top-level commas; commas inside <...> or quotes
// do not split.
std::vector<std::string> split_operands(const std::string& s, int line) {
    std::vector<std::string> out;
    int depth = 0;
    bool in_str = false;
    std::string cur;
    for (char c : s) {
        if (c == '"') in_str = !in_str;
        if (!in_str) {
            if (c == '<') ++depth;
            if (c == '>') --depth;
            if (c == ',' && depth == 0) {
                out.push_back(trim(cur));
                cur.clear();
                continue;
            }
        }
        cur += c;
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    for (const auto& tok : out)
        if (tok.empty()) throw ParseError("empty operand", line);
    if (depth != 0 || in_str) throw ParseError("unbalanced operand list", line);
    return out;
}

struct LineCursor {
    std::vector<std::pair<int, std::string>> lines; // (line number, content)
    size_t pos = 0;

    explicit LineCursor(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int n = 0;
        while (std::getline(in, raw)) {
            ++n;
            std::string s = trim(strip_comment(raw));
            if (!s.empty()) lines.emplace_back(n, s);
        }
    }
    bool done() const { return pos >= lines.size(); }
    const std::pair<int, std::string>& peek() const { return lines[pos]; }
    std::pair<int, std::string> next() { return lines[pos++]; }
};

int parse_reg(const std::string& tok, int line) {
    if (tok.size() < 2 || tok[0] != 'r') throw ParseError("expected register, got '" + tok + "'", line);
    for (size_t i = 1; i < tok.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(tok[i])))
            throw ParseError("expected register, got '" + tok + "'", line);
    return std::stoi(tok.substr(1));
}

bool is_reg(const std::string& tok) {
    if (tok.size() < 2 || tok[0] != 'r') return false;
    for (size_t i = 1; i < tok.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
    return true;
}

long long parse_literal(const std::string& tok, int line) {
    try {
        size_t used = 0;
        long long v = std::stoll(tok, &used);
        if (used != tok.size()) throw ParseError("bad literal '" + tok + "'", line);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        throw ParseError("bad literal '" + tok + "'", line);
    }
}

std::string parse_quoted(const std::string& tok, int line) {
    if (tok.size() < 2 || tok.front() != '"' || tok.back() != '"')
        throw ParseError("expected quoted string, got '" + tok + "'", line);
    return tok.substr(1, tok.size() - 2);
}

MethodSig parse_sig_at(const std::string& tok, int line) {
    try {
        return parse_sig(tok);
    } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()), line);
    }
}

TypeDesc parse_type_at(const std::string& tok, int line) {
    try {
        return parse_type(tok);
    } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()), line);
    }
}

void expect_count(const std::vector<std::string>& ops, size_t n, const char* opname, int line) {
    if (ops.size() != n)
        throw ParseError(std::string(opname) + " expects " + std::to_string(n) + " operands", line);
}

Instruction parse_instruction(const std::string& text, int line) {
    size_t sp = text.find_first_of(" \t");
    std::string opname = sp == std::string::npos ? text : text.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : trim(text.substr(sp + 1));
    auto opc = opcode_from_name(opname);
    if (!opc) throw ParseError("unknown opcode '" + opname + "'", line);
    std::vector<std::string> ops = split_operands(rest, line);

    Instruction ins;
    ins.op = *opc;
    switch (*opc) {
    case Opcode::Const:
        expect_count(ops, 2, "const", line);
        ins.dst = parse_reg(ops[0], line);
        ins.literal = parse_literal(ops[1], line);
        break;
    case Opcode::SConst:
        expect_count(ops, 2, "sconst", line);
        ins.dst = parse_reg(ops[0], line);
        ins.str = parse_quoted(ops[1], line);
        break;
    case Opcode::Move:
        expect_count(ops, 2, "move", line);
        ins.dst = parse_reg(ops[0], line);
        ins.regs.push_back(parse_reg(ops[1], line));
        break;
    case Opcode::Bin: {
        expect_count(ops, 4, "bin", line);
        auto b = binop_from_name(ops[0]);
        if (!b) throw ParseError("unknown bin op '" + ops[0] + "'", line);
        ins.bin_op = *b;
        ins.dst = parse_reg(ops[1], line);
        ins.regs.push_back(parse_reg(ops[2], line));
        ins.regs.push_back(parse_reg(ops[3], line));
        break;
    }
    case Opcode::New:
        expect_count(ops, 2, "new", line);
        ins.dst = parse_reg(ops[0], line);
        ins.str = ops[1];
        break;
    case Opcode::NewArr:
        expect_count(ops, 3, "newarr", line);
        ins.dst = parse_reg(ops[0], line);
        ins.type = parse_type_at(ops[1], line);
        ins.regs.push_back(parse_reg(ops[2], line));
        break;
    case Opcode::ALoad:
        expect_count(ops, 4, "aload", line);
        ins.dst = parse_reg(ops[0], line);
        ins.regs.push_back(parse_reg(ops[1], line));
        ins.regs.push_back(parse_reg(ops[2], line));
        ins.type = parse_type_at(ops[3], line);
        break;
    case Opcode::AStore:
        expect_count(ops, 4, "astore", line);
        ins.regs.push_back(parse_reg(ops[0], line));
        ins.regs.push_back(parse_reg(ops[1], line));
        ins.regs.push_back(parse_reg(ops[2], line));
        ins.type = parse_type_at(ops[3], line);
        break;
    case Opcode::Get:
        expect_count(ops, 3, "get", line);
        ins.dst = parse_reg(ops[0], line);
        ins.regs.push_back(parse_reg(ops[1], line));
        ins.str = ops[2];
        break;
    case Opcode::Put:
        expect_count(ops, 3, "put", line);
        ins.regs.push_back(parse_reg(ops[0], line));
        ins.str = ops[1];
        ins.regs.push_back(parse_reg(ops[2], line));
        break;
    case Opcode::SCall:
    case Opcode::VCall: {
        if (ops.empty()) throw ParseError("call needs a target", line);
        size_t i = 0;
        if (is_reg(ops[0])) {
            ins.dst = parse_reg(ops[0], line);
            i = 1;
        }
        if (i >= ops.size() || ops[i].empty() || ops[i][0] != '<')
            throw ParseError("call target signature expected", line);
        ins.target = parse_sig_at(ops[i], line);
        for (size_t j = i + 1; j < ops.size(); ++j) ins.regs.push_back(parse_reg(ops[j], line));
        break;
    }
    case Opcode::DynCall: {
        if (ops.size() < 3) throw ParseError("dyncall expects at least 3 operands", line);
        if (ops[0] != "_") ins.dst = parse_reg(ops[0], line);
        for (size_t j = 1; j < ops.size(); ++j) ins.regs.push_back(parse_reg(ops[j], line));
        break;
    }
    case Opcode::Ret:
        if (ops.size() > 1) throw ParseError("ret expects at most 1 operand", line);
        if (ops.size() == 1) ins.dst = parse_reg(ops[0], line);
        break;
    case Opcode::Jmp:
        expect_count(ops, 1, "jmp", line);
        ins.str = ops[0];
        break;
    case Opcode::Br:
        expect_count(ops, 3, "br", line);
        ins.regs.push_back(parse_reg(ops[0], line));
        ins.str = ops[1];
        ins.str2 = ops[2];
        break;
    }
    return ins;
}

MethodDef parse_method(LineCursor& cur, const std::string& header, int hline,
                       const std::string& class_name) {
    // header: method [static] <sig> regs <n> {
    size_t lt = header.find('<');
    size_t gt = header.rfind('>');
    if (lt == std::string::npos || gt == std::string::npos || gt < lt)
        throw ParseError("method header missing signature", hline);
    MethodDef m;
    std::string pre = trim(header.substr(0, lt));
    if (pre == "method static") m.is_static = true;
    else if (pre != "method") throw ParseError("bad method header '" + pre + "'", hline);
    m.sig = parse_sig_at(header.substr(lt, gt - lt + 1), hline);
    if (m.sig.owner != class_name)
        throw ParseError("method owner '" + m.sig.owner + "' does not match class '" + class_name + "'",
                         hline);
    std::string rest = trim(header.substr(gt + 1));
    if (!rest.starts_with("regs"))
        throw ParseError("method header missing 'regs <n>'", hline);
    rest = trim(rest.substr(4));
    if (!rest.ends_with("{")) throw ParseError("method header missing '{'", hline);
    rest = trim(rest.substr(0, rest.size() - 1));
    m.num_regs = static_cast<int>(parse_literal(rest, hline));
    if (m.num_regs < 0) throw ParseError("negative register count", hline);

    while (true) {
        if (cur.done()) throw ParseError("unterminated method body", hline);
        auto [line, text] = cur.next();
        if (text == "}") break;
        if (text.ends_with(":") && text.find(' ') == std::string::npos) {
            std::string label = text.substr(0, text.size() - 1);
            if (m.labels.count(label)) throw ParseError("duplicate label '" + label + "'", line);
            m.labels[label] = static_cast<int>(m.body.size());
            continue;
        }
        m.body.push_back(parse_instruction(text, line));
    }
    return m;
}

ClassDef parse_class(LineCursor& cur, const std::string& header, int hline) {
    // header: class <Name> [extends <Name>] {
    std::istringstream hs(header);
    std::string kw, name;
    hs >> kw >> name;
    ClassDef c;
    c.name = name;
    std::string tok;
    hs >> tok;
    if (tok == "extends") {
        std::string super;
        hs >> super;
        if (super.empty()) throw ParseError("extends missing superclass name", hline);
        c.super = super;
        hs >> tok;
    }
    if (tok != "{") throw ParseError("class header missing '{'", hline);
    if (c.name.empty()) throw ParseError("class missing name", hline);

    std::set<std::string> field_names;
    while (true) {
        if (cur.done()) throw ParseError("unterminated class body", hline);
        auto [line, text] = cur.next();
        if (text == "}") break;
        if (text.starts_with("field ")) {
            size_t colon = text.find(':');
            if (colon == std::string::npos) throw ParseError("field missing ':'", line);
            std::string fname = trim(text.substr(6, colon - 6));
            TypeDesc t = parse_type_at(trim(text.substr(colon + 1)), line);
            if (!field_names.insert(fname).second)
                throw ParseError("duplicate field '" + fname + "' in class " + c.name, line);
            c.fields.emplace_back(fname, t);
        } else if (text.starts_with("method ")) {
            MethodDef m = parse_method(cur, text, line, c.name);
            for (const auto& existing : c.methods)
                if (existing.sig.name == m.sig.name && existing.sig.params == m.sig.params)
                    throw ParseError("duplicate method " + m.sig.render(), line);
            c.methods.push_back(std::move(m));
        } else {
            throw ParseError("unexpected line in class body: '" + text + "'", line);
        }
    }
    return c;
}

} // namespace

Program parse_program(const std::string& text) {
    LineCursor cur(text);
    Program p;
    while (!cur.done()) {
        auto [line, s] = cur.next();
        if (s.starts_with("class ") || s == "class") {
            ClassDef c = parse_class(cur, s, line);
            if (p.find_class(c.name)) throw ParseError("duplicate class '" + c.name + "'", line);
            p.classes.push_back(std::move(c));
        } else if (s.starts_with("entry ")) {
            if (p.entry) throw ParseError("duplicate entry declaration", line);
            p.entry = parse_sig_at(trim(s.substr(6)), line);
        } else {
            throw ParseError("unexpected top-level line: '" + s + "'", line);
        }
    }
    return p;
}

} // namespace taintweave
