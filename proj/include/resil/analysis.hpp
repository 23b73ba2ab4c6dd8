#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "resil/query.hpp"

namespace resil {

using Homomorphism = std::map<std::string, std::string>;

// First homomorphism src -> dst in lexicographic backtracking order.
// Throws QueryError when a shared relation name has different arities.
std::optional<Homomorphism> find_homomorphism(const Query& src, const Query& dst);

// Core of q: repeatedly drops atoms while a homomorphism into the rest exists.
Query minimize(const Query& q);

std::vector<Query> components(const Query& q);
std::vector<std::vector<std::size_t>> component_indices(const Query& q);

std::set<std::string> dominated_relations(const Query& q);
Query normalize(const Query& q);

struct Triad {
    std::array<std::size_t, 3> atoms;
};

std::vector<Triad> find_triads(const Query& q);

// Atom permutation with every variable's atoms contiguous.
std::optional<std::vector<std::size_t>> linear_order(const Query& q);

struct PseudoLinearity {
    bool pseudo_linear = false;
    // Groups of endogenous atoms with identical variable sets, in arrangement order.
    std::vector<std::vector<std::size_t>> groups;
    // Result of the simple check: endogenous atoms with contiguous variables.
    bool naive_interval = false;
};

// Requires q minimal and connected; throws QueryError otherwise.
PseudoLinearity is_pseudo_linear(const Query& q);

// Path in the dual hypergraph from atom a to atom b avoiding the given variables.
bool connected_avoiding(const Query& q, std::size_t a, std::size_t b,
                        const std::set<std::string>& banned);

// Canonical text for q up to variable renaming, atom order and relation renaming.
std::string canonical_form(const Query& q);

struct QueryIso {
    std::map<std::string, std::string> vars;  // pattern var -> query var
    std::map<std::string, std::string> rels;  // pattern rel -> query rel
};

// Isomorphism from pattern onto q respecting arity and exogenous flags.
std::optional<QueryIso> match_query(const Query& pattern, const Query& q);

bool homomorphically_equivalent(const Query& a, const Query& b);

}  // namespace resil
