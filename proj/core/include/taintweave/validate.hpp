#pragma once

#include "taintweave/tir.hpp"

namespace taintweave {

enum class LinkErrorKind {
    UnresolvedMethod,
    UnresolvedField,
    UnknownClass,
    BadRegister,
    BadLabel,
    MissingEntry,
    BadEntry,
    CyclicHierarchy,
    BadOverride,
    BadCall,
    BadRet
};

const char* link_error_kind_name(LinkErrorKind kind);

struct LinkError {
    LinkErrorKind kind;
    std::string message;
    std::optional<MethodSig> context; // method being checked, when applicable

    std::string render() const;
};

// Whole-program link check. Returns an empty list iff every call target and
// field access resolves, register/label constraints hold, the hierarchy is
// acyclic, overrides are signature-identical, and the entry method exists.
// Never throws.
std::vector<LinkError> validate_program(const Program& p);

} // namespace taintweave
