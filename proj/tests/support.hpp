#pragma once
// Shared helpers for the test binaries: fixture loading, seeded random
// databases and a subset-enumeration oracle that shares nothing with the
// hitting-set solver.

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "resil/database.hpp"
#include "resil/query.hpp"

#ifndef RESIL_FIXTURES
#define RESIL_FIXTURES "tests/fixtures"
#endif

namespace testing {

inline std::uint64_t seed_from_env(std::uint64_t fallback = 20240601) {
    if (const char* s = std::getenv("RESIL_SEED")) return std::strtoull(s, nullptr, 10);
    return fallback;
}

struct FixtureQuery {
    std::string name, verdict, text;
};

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<FixtureQuery> load_fixture_queries() {
    std::ifstream in(std::string(RESIL_FIXTURES) + "/queries.txt");
    std::vector<FixtureQuery> out;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, '|')) cols.push_back(trim(c));
        if (cols.size() == 3) out.push_back({cols[0], cols[1], cols[2]});
    }
    return out;
}

// Random database over q's relations: at most max_facts tuples over
// constants 1..max_consts. Half the draws plant a witness first so that
// most instances satisfy q.
inline resil::Database random_database(const resil::Query& q, std::mt19937_64& rng, int max_facts = 12,
                                       int max_consts = 6) {
    resil::Database d;
    std::uniform_int_distribution<int> nconst(2, max_consts);
    const int c = nconst(rng);
    auto constant = [&]() { return std::to_string(1 + rng() % c); };
    const int target = 1 + static_cast<int>(rng() % max_facts);
    if (rng() % 2 == 0) {
        std::map<std::string, std::string> val;
        for (const auto& v : q.variables()) val[v] = constant();
        for (const auto& a : q.atoms()) {
            if (static_cast<int>(d.size()) >= target) break;
            std::vector<std::string> t;
            for (const auto& v : a.args) t.push_back(val[v]);
            d.add(a.relation, t);
        }
    }
    std::vector<std::pair<std::string, int>> rels;
    for (const auto& [name, decl] : q.relations()) rels.emplace_back(name, decl.arity);
    int guard = 0;
    while (static_cast<int>(d.size()) < target && guard++ < 200) {
        const auto& [name, arity] = rels[rng() % rels.size()];
        std::vector<std::string> t;
        for (int i = 0; i < arity; ++i) t.push_back(constant());
        d.add(name, t);
    }
    return d;
}

// Smallest set of endogenous facts whose removal falsifies q, by trying
// every subset in order of size; the cost grows with the answer, so large
// databases with small resilience stay cheap. nullopt when no such set exists.
inline std::optional<int> brute_force_resilience(const resil::Database& d, const resil::Query& q) {
    std::vector<resil::Fact> endo;
    for (const auto& f : d.facts())
        if (q.has_relation(f.relation) && !q.is_exogenous(f.relation)) endo.push_back(f);
    const int n = static_cast<int>(endo.size());
    if (n > 30) throw std::runtime_error("brute force limited to 30 endogenous facts");
    for (int k = 0; k <= n; ++k) {
        // Gosper's hack over k-subsets.
        if (k == 0) {
            if (!resil::satisfies(d, q)) return 0;
            continue;
        }
        for (std::uint32_t s = (1u << k) - 1; s < (1u << n);) {
            std::vector<resil::Fact> rm;
            for (int i = 0; i < n; ++i)
                if (s >> i & 1u) rm.push_back(endo[i]);
            if (!resil::satisfies(d.without(rm), q)) return k;
            std::uint32_t c = s & -s, r = s + c;
            s = (((r ^ s) >> 2) / c) | r;
        }
    }
    return std::nullopt;
}

}  // namespace testing
