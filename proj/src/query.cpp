#include "resil/query.hpp"

#include <algorithm>
#include <cctype>

namespace resil {

Query::Query(std::vector<Atom> atoms, const std::set<std::string>& exogenous)
    : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw QueryError("query must contain at least one atom");
    for (const auto& a : atoms_) {
        if (a.args.empty()) throw QueryError("atom " + a.relation + " has no arguments");
        auto it = rels_.find(a.relation);
        if (it == rels_.end()) {
            rels_[a.relation] = {a.relation, static_cast<int>(a.args.size()),
                                 exogenous.count(a.relation) > 0};
        } else if (it->second.arity != static_cast<int>(a.args.size())) {
            throw QueryError("relation " + a.relation + " used with arities " +
                             std::to_string(it->second.arity) + " and " +
                             std::to_string(a.args.size()));
        }
        for (const auto& v : a.args)
            if (std::find(vars_.begin(), vars_.end(), v) == vars_.end()) vars_.push_back(v);
    }
}

const RelationDecl& Query::relation(const std::string& name) const {
    auto it = rels_.find(name);
    if (it == rels_.end()) throw QueryError("unknown relation " + name);
    return it->second;
}

bool Query::is_exogenous(const std::string& rel) const {
    auto it = rels_.find(rel);
    return it != rels_.end() && it->second.exogenous;
}

std::set<std::string> Query::exogenous_relations() const {
    std::set<std::string> out;
    for (const auto& [n, d] : rels_)
        if (d.exogenous) out.insert(n);
    return out;
}

std::set<std::string> Query::atom_vars(std::size_t i) const {
    const auto& a = atoms_.at(i).args;
    return {a.begin(), a.end()};
}

int Query::occurrences(const std::string& rel) const {
    return static_cast<int>(std::count_if(atoms_.begin(), atoms_.end(),
                                          [&](const Atom& a) { return a.relation == rel; }));
}

std::vector<std::string> Query::repeated_relations() const {
    std::vector<std::string> out;
    for (const auto& [n, d] : rels_)
        if (occurrences(n) > 1) out.push_back(n);
    return out;
}

int Query::max_arity() const {
    int m = 0;
    for (const auto& [n, d] : rels_) m = std::max(m, d.arity);
    return m;
}

Query Query::subquery(const std::vector<std::size_t>& idx) const {
    std::vector<Atom> sub;
    for (auto i : idx) sub.push_back(atoms_.at(i));
    return Query(std::move(sub), exogenous_relations());
}

Query Query::with_exogenous(const std::set<std::string>& extra) const {
    auto exo = exogenous_relations();
    exo.insert(extra.begin(), extra.end());
    return Query(atoms_, exo);
}

Query Query::renamed(const std::map<std::string, std::string>& var_map,
                     const std::map<std::string, std::string>& rel_map) const {
    auto look = [](const std::map<std::string, std::string>& m, const std::string& k) {
        auto it = m.find(k);
        return it == m.end() ? k : it->second;
    };
    std::vector<Atom> out;
    std::set<std::string> exo;
    for (const auto& a : atoms_) {
        Atom b{look(rel_map, a.relation), {}};
        for (const auto& v : a.args) b.args.push_back(look(var_map, v));
        if (is_exogenous(a.relation)) exo.insert(b.relation);
        out.push_back(std::move(b));
    }
    return Query(std::move(out), exo);
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Query run() {
        skip();
        expect_ident("query name");
        skip();
        if (s_.compare(p_, 2, ":-") != 0) throw ParseError("expected ':-'", p_);
        p_ += 2;
        std::vector<Atom> atoms;
        std::map<std::string, bool> exo;
        while (true) {
            skip();
            std::size_t at = p_;
            std::string rel = expect_ident("relation name");
            bool x = false;
            if (p_ < s_.size() && s_[p_] == '^') {
                ++p_;
                if (p_ >= s_.size() || s_[p_] != 'x') throw ParseError("expected 'x' after '^'", p_);
                ++p_;
                x = true;
            }
            auto it = exo.find(rel);
            if (it != exo.end() && it->second != x)
                throw ParseError("inconsistent exogenous marking for " + rel, at);
            exo[rel] = x;
            skip();
            if (p_ >= s_.size() || s_[p_] != '(') throw ParseError("expected '('", p_);
            ++p_;
            Atom a{rel, {}};
            while (true) {
                skip();
                std::size_t vp = p_;
                if (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_])))
                    throw ParseError("constants are not allowed in queries", vp);
                if (p_ < s_.size() && (s_[p_] == '\'' || s_[p_] == '"'))
                    throw ParseError("constants are not allowed in queries", vp);
                std::string v = expect_ident("variable");
                if (!std::islower(static_cast<unsigned char>(v[0])))
                    throw ParseError("variables must start with a lowercase letter", vp);
                a.args.push_back(v);
                skip();
                if (p_ < s_.size() && s_[p_] == ',') { ++p_; continue; }
                if (p_ < s_.size() && s_[p_] == ')') { ++p_; break; }
                throw ParseError("expected ',' or ')'", p_);
            }
            atoms.push_back(std::move(a));
            skip();
            if (p_ < s_.size() && s_[p_] == ',') { ++p_; continue; }
            if (p_ < s_.size() && s_[p_] == '.') { ++p_; skip(); }
            if (p_ >= s_.size()) break;
            // Tolerate whitespace-separated atoms, a common shorthand.
            if (std::isalpha(static_cast<unsigned char>(s_[p_]))) continue;
            throw ParseError("unexpected character", p_);
        }
        std::set<std::string> exo_set;
        for (const auto& [r, x] : exo)
            if (x) exo_set.insert(r);
        try {
            return Query(std::move(atoms), exo_set);
        } catch (const QueryError& e) {
            throw ParseError(e.what(), p_);
        }
    }

private:
    void skip() {
        while (p_ < s_.size()) {
            if (std::isspace(static_cast<unsigned char>(s_[p_]))) {
                ++p_;
            } else if (s_[p_] == '#') {
                while (p_ < s_.size() && s_[p_] != '\n') ++p_;
            } else {
                break;
            }
        }
    }

    std::string expect_ident(const char* what) {
        std::size_t b = p_;
        while (p_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_'))
            ++p_;
        if (b == p_) throw ParseError(std::string("expected ") + what, b);
        if (std::isdigit(static_cast<unsigned char>(s_[b])))
            throw ParseError(std::string("expected ") + what, b);
        return s_.substr(b, p_ - b);
    }

    const std::string& s_;
    std::size_t p_ = 0;
};

}  // namespace

Query parse_query(const std::string& text) { return Parser(text).run(); }

std::string format_atom(const Query& q, std::size_t i) {
    const auto& a = q.atom(i);
    std::string out = a.relation;
    if (q.is_exogenous(a.relation)) out += "^x";
    out += "(";
    for (std::size_t k = 0; k < a.args.size(); ++k) {
        if (k) out += ",";
        out += a.args[k];
    }
    return out + ")";
}

std::string serialize_query(const Query& q) {
    std::string out = "q :- ";
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (i) out += ", ";
        out += format_atom(q, i);
    }
    return out;
}

DualHypergraph dual_hypergraph(const Query& q) {
    DualHypergraph h;
    h.vertices = q.atoms();
    for (const auto& v : q.variables()) {
        std::set<std::size_t> e;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const auto& args = q.atom(i).args;
            if (std::find(args.begin(), args.end(), v) != args.end()) e.insert(i);
        }
        h.edge_labels.push_back(v);
        h.edges.push_back(std::move(e));
    }
    return h;
}

BinaryGraph binary_graph(const Query& q) {
    if (q.max_arity() > 2) throw QueryError("binary graph requires arity <= 2");
    BinaryGraph g;
    g.vertices = q.variables();
    for (const auto& a : q.atoms()) {
        if (a.args.size() == 1)
            g.edges.push_back({a.args[0], a.args[0], a.relation});
        else
            g.edges.push_back({a.args[0], a.args[1], a.relation});
    }
    return g;
}

}  // namespace resil
