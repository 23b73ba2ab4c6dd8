#pragma once

#include <optional>
#include <string>
#include <vector>

#include "resil/analysis.hpp"
#include "resil/query.hpp"

namespace resil {

enum class Verdict { PTIME, NP_COMPLETE, OPEN, UNSUPPORTED };

enum class FindingKind {
    TRIAD,
    UNARY_PATH,
    BINARY_PATH,
    CHAIN,
    CONFLUENCE,
    CONFLUENCE_EXO_PATH,
    PERMUTATION,
    BOUNDED_PERMUTATION,
    REP,
    CATALOG_MATCH,
};

std::string to_string(Verdict v);
std::string to_string(FindingKind k);
std::optional<Verdict> parse_verdict(const std::string& s);

struct StructuralFinding {
    FindingKind kind;
    std::vector<std::size_t> atoms;  // indices into the analyzed query
    std::vector<std::string> variables;
    std::string citation;
    std::string detail;
};

struct Classification {
    Verdict verdict = Verdict::UNSUPPORTED;
    std::vector<StructuralFinding> findings;
    std::string solver_plan;   // PTIME only; a name accepted by run_method
    Query normalized_query;    // minimized and normalized (connected queries)
    Query minimized_query;
    // Per-component classifications when the minimized query is disconnected.
    std::vector<Classification> components;
    std::vector<std::string> notes;

    bool hard() const { return verdict == Verdict::NP_COMPLETE; }
};

// Two distinct unary atoms of the repeated relation, or two of its binary
// atoms with disjoint variables not linked by a chain of its atoms.
// Requires q connected with exactly one endogenous repeated relation of arity <= 2.
std::optional<StructuralFinding> detect_path(const Query& q);

// Requires exactly two atoms of the repeated relation sharing a variable.
StructuralFinding detect_2R_pattern(const Query& q);

// Requires the permutation R(x,y), R(y,x) as the only self-join.
bool is_bounded_permutation(const Query& q);

// Requires the confluence R(x,y), R(z,y) as the only self-join.
bool has_confluence_exogenous_path(const Query& q);

Classification classify(const Query& q);

struct CatalogEntry {
    std::string name;
    Verdict verdict;
    std::string plan;
    std::string citation;
    Query query;
    std::string key;  // canonical form of normalize(minimize(query))
};

const std::vector<CatalogEntry>& catalog();
std::vector<CatalogEntry> parse_catalog(const std::string& text);
const CatalogEntry* catalog_lookup(const Query& normalized);

}  // namespace resil
