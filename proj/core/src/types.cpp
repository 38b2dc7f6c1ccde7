#include "taintweave/types.hpp"

namespace taintweave {

namespace {

bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '$' || c == '.';
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

} // namespace

std::string TypeDesc::render() const {
    switch (kind) {
    case TypeKind::Int: return "int";
    case TypeKind::Bool: return "bool";
    case TypeKind::ClassRef: return class_name;
    case TypeKind::Array: {
        std::string base;
        if (elem_kind == TypeKind::Int) base = "int";
        else if (elem_kind == TypeKind::Bool) base = "bool";
        else base = elem_class;
        for (int i = 0; i < dims; ++i) base += "[]";
        return base;
    }
    }
    return "int";
}

TypeDesc parse_type(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) throw ParseError("empty type");
    size_t pos = 0;
    while (pos < s.size() && ident_char(s[pos])) ++pos;
    if (pos == 0) throw ParseError("bad type: " + std::string(text));
    std::string base(s.substr(0, pos));
    int dims = 0;
    while (pos + 1 < s.size() + 1 && s.substr(pos).starts_with("[]")) {
        ++dims;
        pos += 2;
    }
    if (pos != s.size()) throw ParseError("bad type: " + std::string(text));
    TypeKind bk;
    if (base == "int") bk = TypeKind::Int;
    else if (base == "bool") bk = TypeKind::Bool;
    else bk = TypeKind::ClassRef;
    if (dims == 0) {
        if (bk == TypeKind::ClassRef) return TypeDesc::make_class(base);
        return bk == TypeKind::Bool ? TypeDesc::make_bool() : TypeDesc::make_int();
    }
    return TypeDesc::make_array(bk, bk == TypeKind::ClassRef ? base : "", dims);
}

std::string MethodSig::render() const {
    std::string out = "<" + owner + ": ";
    out += ret ? ret->render() : "void";
    out += " " + name + "(";
    for (size_t i = 0; i < params.size(); ++i) {
        if (i) out += ",";
        out += params[i].render();
    }
    out += ")>";
    return out;
}

MethodSig parse_sig(std::string_view text) {
    std::string_view s = trim(text);
    if (s.size() < 2 || s.front() != '<' || s.back() != '>')
        throw ParseError("signature must be angle-bracketed: " + std::string(text));
    s = s.substr(1, s.size() - 2);
    size_t colon = s.find(':');
    if (colon == std::string_view::npos) throw ParseError("signature missing ':'");
    MethodSig sig;
    sig.owner = std::string(trim(s.substr(0, colon)));
    if (sig.owner.empty()) throw ParseError("signature missing owner");
    std::string_view rest = trim(s.substr(colon + 1));
    size_t sp = rest.find(' ');
    if (sp == std::string_view::npos) throw ParseError("signature missing return type");
    std::string_view ret = trim(rest.substr(0, sp));
    if (ret != "void") sig.ret = parse_type(ret);
    rest = trim(rest.substr(sp + 1));
    size_t lp = rest.find('(');
    if (lp == std::string_view::npos || rest.back() != ')')
        throw ParseError("signature missing parameter list");
    sig.name = std::string(trim(rest.substr(0, lp)));
    if (sig.name.empty()) throw ParseError("signature missing method name");
    std::string_view plist = rest.substr(lp + 1, rest.size() - lp - 2);
    plist = trim(plist);
    if (!plist.empty()) {
        size_t start = 0;
        while (true) {
            size_t comma = plist.find(',', start);
            std::string_view tok = comma == std::string_view::npos
                                       ? plist.substr(start)
                                       : plist.substr(start, comma - start);
            sig.params.push_back(parse_type(tok));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
    }
    return sig;
}

std::optional<MethodSig> try_parse_sig(std::string_view text) {
    try {
        return parse_sig(text);
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

} // namespace taintweave
