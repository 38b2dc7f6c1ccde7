#pragma once

#include "taintweave/facts.hpp"

#include <functional>
#include <set>

namespace taintweave {

// Source/sink seed lists. A source seed's taint label bit is its index in
// the list (must stay below 64).
struct SeedConfig {
    std::vector<MethodSig> source_seeds;
    std::vector<MethodSig> sink_seeds;

    std::optional<int> source_label_bit(const MethodSig& sig) const;
};

SeedConfig default_seeds();

// INI-like seeds file: `[sources]` / `[sinks]` sections, one canonical
// signature per line, `#` comments. Throws ParseError with line numbers.
SeedConfig parse_seeds_file(const std::string& text);
std::string emit_seeds_file(const SeedConfig& seeds);

struct ScopeResult {
    std::set<MethodSig> source_set;
    std::set<MethodSig> sink_set;
    std::set<MethodSig> intersection;
};

// Generic semi-naive least fixpoint: starts from `base`, repeatedly applies
// `step` to the newly derived delta only, until no new members appear.
std::set<MethodSig> fixpoint(
    std::set<MethodSig> base,
    const std::function<std::set<MethodSig>(const std::set<MethodSig>& delta)>& step);

// Forward closure: base = callers of source seeds; step = callees of
// members. Seed signatures themselves are excluded from the result.
std::set<MethodSig> compute_source_set(const std::set<CallEdge>& edges, const SeedConfig& seeds);

// Backward closure: base = callers of sink seeds; step = callers of members.
std::set<MethodSig> compute_sink_set(const std::set<CallEdge>& edges, const SeedConfig& seeds);

ScopeResult compute_intersection(std::set<MethodSig> src, std::set<MethodSig> snk);

// Optional extra source rule (off by default): callers of source members
// also become sources, capturing tainted return values flowing upward.
std::set<MethodSig> compute_source_set_with_caller_closure(const std::set<CallEdge>& edges,
                                                           const SeedConfig& seeds);

// Methods file: one canonical signature per line, lexicographically sorted,
// LF-terminated. Blank lines and `#` comments ignored on parse.
struct MethodsFile {
    std::set<MethodSig> methods;
    auto operator<=>(const MethodsFile&) const = default;
};

std::string emit_methods_file(const MethodsFile& m);
MethodsFile parse_methods_file(const std::string& text); // throws ParseError

} // namespace taintweave
