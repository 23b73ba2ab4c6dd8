#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace resil {

struct RelationDecl {
    std::string name;
    int arity = 0;
    bool exogenous = false;

    bool operator==(const RelationDecl&) const = default;
};

struct Atom {
    std::string relation;
    std::vector<std::string> args;

    bool operator==(const Atom&) const = default;
    bool operator<(const Atom& o) const {
        return relation != o.relation ? relation < o.relation : args < o.args;
    }
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at offset " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

class QueryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Boolean conjunctive query. Exogenous marking is per relation name.
class Query {
public:
    Query() = default;
    // Throws QueryError on an empty atom list or arity mismatch.
    Query(std::vector<Atom> atoms, const std::set<std::string>& exogenous);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const Atom& atom(std::size_t i) const { return atoms_.at(i); }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    const std::map<std::string, RelationDecl>& relations() const { return rels_; }
    const RelationDecl& relation(const std::string& name) const;
    bool has_relation(const std::string& name) const { return rels_.count(name) > 0; }
    bool is_exogenous(const std::string& rel) const;
    bool atom_exogenous(std::size_t i) const { return is_exogenous(atoms_[i].relation); }
    std::set<std::string> exogenous_relations() const;

    // Variables in order of first occurrence.
    const std::vector<std::string>& variables() const { return vars_; }
    std::set<std::string> atom_vars(std::size_t i) const;
    int occurrences(const std::string& rel) const;
    // Relations with more than one atom.
    std::vector<std::string> repeated_relations() const;
    bool self_join_free() const { return repeated_relations().empty(); }
    int max_arity() const;

    // Sub-query over the given atom indices, in the given order.
    Query subquery(const std::vector<std::size_t>& idx) const;
    Query with_exogenous(const std::set<std::string>& extra) const;
    Query renamed(const std::map<std::string, std::string>& var_map,
                  const std::map<std::string, std::string>& rel_map = {}) const;

    bool operator==(const Query& o) const { return atoms_ == o.atoms_ && rels_ == o.rels_; }

private:
    std::vector<Atom> atoms_;
    std::map<std::string, RelationDecl> rels_;
    std::vector<std::string> vars_;
};

Query parse_query(const std::string& text);
std::string serialize_query(const Query& q);
std::string format_atom(const Query& q, std::size_t i);

struct DualHypergraph {
    std::vector<Atom> vertices;
    std::vector<std::string> edge_labels;
    std::vector<std::set<std::size_t>> edges;  // atom indices per variable
};

DualHypergraph dual_hypergraph(const Query& q);

struct LabeledEdge {
    std::string from, to, label;
    bool loop() const { return from == to; }
};

struct BinaryGraph {
    std::vector<std::string> vertices;
    std::vector<LabeledEdge> edges;
};

// Throws QueryError if some relation has arity > 2.
BinaryGraph binary_graph(const Query& q);

}  // namespace resil
