#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace taintweave {

struct ParseError : std::runtime_error {
    int line = 0;
    int column = 0;
    ParseError(std::string msg, int line_ = 0, int col_ = 0)
        : std::runtime_error(std::move(msg)), line(line_), column(col_) {}
};

enum class TypeKind { Int, Bool, ClassRef, Array };

// A value type. Arrays carry a non-array element (kind + class name for
// class elements) and a nesting depth `dims`.
struct TypeDesc {
    TypeKind kind = TypeKind::Int;
    std::string class_name;           // ClassRef only
    TypeKind elem_kind = TypeKind::Int; // Array only, never Array itself
    std::string elem_class;           // Array of class refs
    int dims = 0;                     // Array only, >= 1

    auto operator<=>(const TypeDesc&) const = default;

    static TypeDesc make_int() { return {}; }
    static TypeDesc make_bool() { return {TypeKind::Bool, "", TypeKind::Int, "", 0}; }
    static TypeDesc make_class(std::string name) {
        return {TypeKind::ClassRef, std::move(name), TypeKind::Int, "", 0};
    }
    static TypeDesc make_array(TypeKind elem, std::string elem_cls, int dims) {
        return {TypeKind::Array, "", elem, std::move(elem_cls), dims};
    }

    bool is_primitive() const { return kind == TypeKind::Int || kind == TypeKind::Bool; }
    bool is_array() const { return kind == TypeKind::Array; }
    bool is_prim_array() const {
        return is_array() && (elem_kind == TypeKind::Int || elem_kind == TypeKind::Bool);
    }
    bool is_prim_array1() const { return is_prim_array() && dims == 1; }
    bool is_prim_multidim() const { return is_prim_array() && dims > 1; }

    // Type of one element of this array.
    TypeDesc element() const {
        if (dims > 1) return make_array(elem_kind, elem_class, dims - 1);
        if (elem_kind == TypeKind::ClassRef) return make_class(elem_class);
        return elem_kind == TypeKind::Bool ? make_bool() : make_int();
    }
    // Array of this type.
    TypeDesc arrayed() const {
        if (kind == TypeKind::Array) return make_array(elem_kind, elem_class, dims + 1);
        if (kind == TypeKind::ClassRef) return make_array(TypeKind::ClassRef, class_name, 1);
        return make_array(kind, "", 1);
    }

    std::string render() const;
};

TypeDesc parse_type(std::string_view text); // throws ParseError

// Method signature in the canonical `<Owner: ret name(p1,p2)>` rendering.
// `ret` absent means void.
struct MethodSig {
    std::string owner;
    std::optional<TypeDesc> ret;
    std::string name;
    std::vector<TypeDesc> params;

    auto operator<=>(const MethodSig&) const = default;

    std::string render() const;
};

MethodSig parse_sig(std::string_view text);                    // throws ParseError
std::optional<MethodSig> try_parse_sig(std::string_view text); // nullopt on error

} // namespace taintweave
