#include "taintweave/scope.hpp"

#include "taintweave/builtins.hpp"

#include <map>
#include <sstream>

namespace taintweave {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

using Adjacency = std::map<MethodSig, std::vector<MethodSig>>;

Adjacency callees_of(const std::set<CallEdge>& edges) {
    Adjacency adj;
    for (const auto& [a, b] : edges) adj[a].push_back(b);
    return adj;
}

Adjacency callers_of(const std::set<CallEdge>& edges) {
    Adjacency adj;
    for (const auto& [a, b] : edges) adj[b].push_back(a);
    return adj;
}

std::set<MethodSig> neighbors(const Adjacency& adj, const std::set<MethodSig>& from) {
    std::set<MethodSig> out;
    for (const auto& m : from) {
        auto it = adj.find(m);
        if (it == adj.end()) continue;
        out.insert(it->second.begin(), it->second.end());
    }
    return out;
}

void erase_seeds(std::set<MethodSig>& set, const SeedConfig& seeds) {
    for (const auto& s : seeds.source_seeds) set.erase(s);
    for (const auto& s : seeds.sink_seeds) set.erase(s);
}

} // namespace

std::optional<int> SeedConfig::source_label_bit(const MethodSig& sig) const {
    for (size_t i = 0; i < source_seeds.size(); ++i)
        if (source_seeds[i] == sig) return static_cast<int>(i);
    return std::nullopt;
}

SeedConfig default_seeds() {
    SeedConfig s;
    s.source_seeds = {sig_in_read(), sig_in_readbuf()};
    s.sink_seeds = {sig_out_write(), sig_sys_exec()};
    return s;
}

SeedConfig parse_seeds_file(const std::string& text) {
    SeedConfig out;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    enum { None, Sources, Sinks } section = None;
    while (std::getline(in, raw)) {
        ++lineno;
        size_t hash = raw.find('#');
        std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s == "[sources]") {
            section = Sources;
            continue;
        }
        if (s == "[sinks]") {
            section = Sinks;
            continue;
        }
        if (s.front() == '[') throw ParseError("unknown seeds section '" + s + "'", lineno);
        if (section == None) throw ParseError("signature outside [sources]/[sinks]", lineno);
        MethodSig sig;
        try {
            sig = parse_sig(s);
        } catch (const ParseError& e) {
            throw ParseError("bad seed signature: " + std::string(e.what()), lineno);
        }
        auto& list = section == Sources ? out.source_seeds : out.sink_seeds;
        bool dup = false;
        for (const auto& existing : list) dup = dup || existing == sig;
        if (dup) throw ParseError("duplicate seed " + sig.render(), lineno);
        list.push_back(std::move(sig));
    }
    if (out.source_seeds.size() > 64) throw ParseError("more than 64 source seeds");
    return out;
}

std::string emit_seeds_file(const SeedConfig& seeds) {
    std::ostringstream out;
    out << "[sources]\n";
    for (const auto& s : seeds.source_seeds) out << s.render() << "\n";
    out << "[sinks]\n";
    for (const auto& s : seeds.sink_seeds) out << s.render() << "\n";
    return out.str();
}

std::set<MethodSig> fixpoint(
    std::set<MethodSig> base,
    const std::function<std::set<MethodSig>(const std::set<MethodSig>&)>& step) {
    std::set<MethodSig> result = base;
    std::set<MethodSig> delta = std::move(base);
    while (!delta.empty()) {
        std::set<MethodSig> derived = step(delta);
        delta.clear();
        for (const auto& m : derived)
            if (result.insert(m).second) delta.insert(m);
    }
    return result;
}

std::set<MethodSig> compute_source_set(const std::set<CallEdge>& edges, const SeedConfig& seeds) {
    Adjacency fwd = callees_of(edges);
    Adjacency bwd = callers_of(edges);
    std::set<MethodSig> base;
    for (const auto& seed : seeds.source_seeds) {
        auto it = bwd.find(seed);
        if (it != bwd.end()) base.insert(it->second.begin(), it->second.end());
    }
    auto result = fixpoint(std::move(base),
                           [&](const std::set<MethodSig>& delta) { return neighbors(fwd, delta); });
    erase_seeds(result, seeds);
    return result;
}

std::set<MethodSig> compute_sink_set(const std::set<CallEdge>& edges, const SeedConfig& seeds) {
    Adjacency bwd = callers_of(edges);
    std::set<MethodSig> base;
    for (const auto& seed : seeds.sink_seeds) {
        auto it = bwd.find(seed);
        if (it != bwd.end()) base.insert(it->second.begin(), it->second.end());
    }
    auto result = fixpoint(std::move(base),
                           [&](const std::set<MethodSig>& delta) { return neighbors(bwd, delta); });
    erase_seeds(result, seeds);
    return result;
}

std::set<MethodSig> compute_source_set_with_caller_closure(const std::set<CallEdge>& edges,
                                                           const SeedConfig& seeds) {
    Adjacency fwd = callees_of(edges);
    Adjacency bwd = callers_of(edges);
    std::set<MethodSig> base;
    for (const auto& seed : seeds.source_seeds) {
        auto it = bwd.find(seed);
        if (it != bwd.end()) base.insert(it->second.begin(), it->second.end());
    }
    auto result = fixpoint(std::move(base), [&](const std::set<MethodSig>& delta) {
        std::set<MethodSig> out = neighbors(fwd, delta);
        std::set<MethodSig> up = neighbors(bwd, delta);
        out.insert(up.begin(), up.end());
        return out;
    });
    erase_seeds(result, seeds);
    return result;
}

ScopeResult compute_intersection(std::set<MethodSig> src, std::set<MethodSig> snk) {
    ScopeResult r;
    for (const auto& m : src)
        if (snk.count(m)) r.intersection.insert(m);
    r.source_set = std::move(src);
    r.sink_set = std::move(snk);
    return r;
}

std::string emit_methods_file(const MethodsFile& m) {
    std::string out;
    for (const auto& sig : m.methods) out += sig.render() + "\n";
    return out;
}

MethodsFile parse_methods_file(const std::string& text) {
    MethodsFile out;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        size_t hash = raw.find('#');
        std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        try {
            out.methods.insert(parse_sig(s));
        } catch (const ParseError& e) {
            throw ParseError("malformed signature: " + std::string(e.what()), lineno);
        }
    }
    return out;
}

} // namespace taintweave
