#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "resil/query.hpp"

namespace resil {

// Orders constants numerically when both are integers, else lexicographically.
struct ConstLess {
    bool operator()(const std::string& a, const std::string& b) const;
};

struct TupleLess {
    bool operator()(const std::vector<std::string>& a, const std::vector<std::string>& b) const;
};

struct Fact {
    std::string relation;
    std::vector<std::string> args;

    bool operator==(const Fact&) const = default;
    bool operator<(const Fact& o) const;
    std::string str() const;
};

class DatabaseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Database {
public:
    using TupleSet = std::set<std::vector<std::string>, TupleLess>;

    // Returns false when the tuple was already present.
    bool add(const std::string& rel, std::vector<std::string> args);
    bool add(const Fact& f) { return add(f.relation, f.args); }
    bool erase(const Fact& f);
    bool contains(const Fact& f) const;

    const std::map<std::string, TupleSet>& relations() const { return rels_; }
    const TupleSet& tuples(const std::string& rel) const;
    int arity(const std::string& rel) const;
    std::size_t size() const;
    std::vector<Fact> facts() const;  // sorted
    std::set<std::string, ConstLess> constants() const;

    Database without(const std::vector<Fact>& removed) const;
    // Renames relations; unmapped relations are kept unless drop_unmapped.
    Database renamed_relations(const std::map<std::string, std::string>& m,
                               bool drop_unmapped = false) const;

    bool operator==(const Database& o) const { return rels_ == o.rels_; }

private:
    std::map<std::string, TupleSet> rels_;
    std::map<std::string, int> arity_;
};

Database load_database(const std::string& text);
std::string serialize_database(const Database& d);
Fact parse_fact(const std::string& text);

// Throws DatabaseError if a relation of q appears in d with a different arity.
void check_arities(const Database& d, const Query& q);

struct Witness {
    std::vector<std::string> values;  // one per q.variables()
    std::vector<std::size_t> support;  // indices into WitnessSet::facts, sorted, unique
};

struct WitnessSet {
    std::vector<Fact> facts;      // every fact of the relations used by q, sorted
    std::vector<char> endogenous; // per fact
    std::vector<Witness> witnesses;

    std::size_t index_of(const Fact& f) const;  // facts.size() if absent
};

WitnessSet enumerate_witnesses(const Database& d, const Query& q);
bool satisfies(const Database& d, const Query& q);

}  // namespace resil
