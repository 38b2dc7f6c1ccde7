#pragma once

#include "taintweave/tir.hpp"

namespace taintweave {

// Class/method/field resolution over a program plus the implicit builtin
// classes, walking superclass chains.

const ClassDef* lookup_class(const Program& p, const std::string& name);

// Transitive-reflexive subclass test; false if either class is unknown.
bool is_subclass_of(const Program& p, const std::string& sub, const std::string& super);

struct ResolvedMethod {
    const ClassDef* cls = nullptr;
    const MethodDef* method = nullptr;
};

// Finds (name, params) starting at `owner`, walking up the superclass chain.
ResolvedMethod resolve_method(const Program& p, const std::string& owner, const std::string& name,
                              const std::vector<TypeDesc>& params);
ResolvedMethod resolve_method(const Program& p, const MethodSig& sig);

// Finds a field on `owner` or an ancestor; returns its type or nullptr.
const TypeDesc* resolve_field(const Program& p, const std::string& owner, const std::string& field);

// All subclasses of `name` (excluding name itself) declared in the program.
std::vector<std::string> subclasses_of(const Program& p, const std::string& name);

} // namespace taintweave
