#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "resil/database.hpp"
#include "resil/query.hpp"

namespace resil {

struct IJPCandidate {
    Database database;
    Query query;
    std::string relation;
    std::vector<std::string> tuple_a, tuple_b;
};

struct ConditionResult {
    bool ok = false;
    std::string evidence;
};

struct IJPReport {
    ConditionResult c1, c2, c3, c4, c5;
    // Resilience on the (closed) database: intact, without a, without b, without both.
    int rho = -1, rho_minus_a = -1, rho_minus_b = -1, rho_minus_ab = -1;
    std::vector<Fact> gamma, gamma_minus_a, gamma_minus_b, gamma_minus_ab;
    std::vector<Fact> closure_added;
    Database closed;  // database the conditions 2, 3 and 5 were evaluated on
    std::size_t witnesses_with_a = 0, witnesses_with_b = 0;

    bool pass() const { return c1.ok && c2.ok && c3.ok && c4.ok && c5.ok; }
};

// Adds b_j for every exogenous tuple equal to a_j (and symmetrically) until nothing changes.
// j ranges over strictly increasing index vectors.
Database closure_condition4(const IJPCandidate& cand);

IJPReport check_ijp(const IJPCandidate& cand);

// Restricted growth strings of length n in lexicographic order. The callback
// returns false to stop early. Returns the number of strings visited.
std::uint64_t enumerate_partitions(int n, const std::function<bool(const std::vector<int>&)>& visit);
std::uint64_t bell_number(int n);

struct IJPFound {
    IJPCandidate candidate;  // database already closed under condition 4
    IJPReport report;
    int joins = 0;
    // Blocks of the canonical-witness constants (named var + join number, e.g. x1).
    std::vector<std::vector<std::string>> partition;
};

struct IJPSearchOptions {
    int max_joins = 3;
    std::uint64_t budget = 1000000;  // partitions, summed over all join counts
    bool first_only = false;          // stop at the first join count that yields a find
};

struct IJPSearchResult {
    std::vector<IJPFound> found;
    std::vector<std::uint64_t> partitions_per_join;  // index j-1
    std::uint64_t candidates_checked = 0;
    bool complete = true;  // false when the budget cut the search short
};

// The canonical database of j disjoint witnesses, one fresh constant per
// variable and join. Constants are named by variable and join ("x1", "y2").
Database canonical_witnesses(const Query& q, int joins);

IJPSearchResult ijp_search(const Query& q, const IJPSearchOptions& opt = {});

// Constant bijection mapping one candidate onto the other, pair included.
bool candidates_isomorphic(const IJPCandidate& a, const IJPCandidate& b);
bool databases_isomorphic(const Database& a, const Database& b);

}  // namespace resil
