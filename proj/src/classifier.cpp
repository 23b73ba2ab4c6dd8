#include "resil/classifier.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "catalog_data.hpp"

namespace resil {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::PTIME: return "PTIME";
        case Verdict::NP_COMPLETE: return "NP_COMPLETE";
        case Verdict::OPEN: return "OPEN";
        case Verdict::UNSUPPORTED: return "UNSUPPORTED";
    }
    return "?";
}

std::optional<Verdict> parse_verdict(const std::string& s) {
    for (auto v : {Verdict::PTIME, Verdict::NP_COMPLETE, Verdict::OPEN, Verdict::UNSUPPORTED})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

std::string to_string(FindingKind k) {
    switch (k) {
        case FindingKind::TRIAD: return "TRIAD";
        case FindingKind::UNARY_PATH: return "UNARY_PATH";
        case FindingKind::BINARY_PATH: return "BINARY_PATH";
        case FindingKind::CHAIN: return "CHAIN";
        case FindingKind::CONFLUENCE: return "CONFLUENCE";
        case FindingKind::CONFLUENCE_EXO_PATH: return "CONFLUENCE_EXO_PATH";
        case FindingKind::PERMUTATION: return "PERMUTATION";
        case FindingKind::BOUNDED_PERMUTATION: return "BOUNDED_PERMUTATION";
        case FindingKind::REP: return "REP";
        case FindingKind::CATALOG_MATCH: return "CATALOG_MATCH";
    }
    return "?";
}

namespace {

// The single endogenous relation with more than one atom.
std::string sj_relation(const Query& q, const char* op) {
    std::vector<std::string> out;
    for (const auto& r : q.repeated_relations())
        if (!q.is_exogenous(r)) out.push_back(r);
    if (out.size() != 1)
        throw QueryError(std::string(op) + ": precondition violated, need exactly one endogenous self-join");
    return out[0];
}

std::vector<std::size_t> atoms_of(const Query& q, const std::string& rel) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q.atom(i).relation == rel) out.push_back(i);
    return out;
}

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
    for (const auto& v : a)
        if (b.count(v)) return false;
    return true;
}

bool has_repeat(const Atom& a) {
    std::set<std::string> s(a.args.begin(), a.args.end());
    return s.size() != a.args.size();
}

// The two R atoms of a permutation or confluence.
std::pair<std::size_t, std::size_t> two_atoms(const Query& q, const char* op, FindingKind want) {
    auto f = detect_2R_pattern(q);
    if (f.kind != want)
        throw QueryError(std::string(op) + ": precondition violated, pattern is " + to_string(f.kind));
    return {f.atoms[0], f.atoms[1]};
}

// R atoms form a simple directed path R(x1,x2), R(x2,x3), ..., all variables distinct.
std::optional<std::vector<std::size_t>> k_chain(const Query& q, const std::string& R) {
    auto idx = atoms_of(q, R);
    if (q.relation(R).arity != 2 || idx.size() < 2) return std::nullopt;
    std::map<std::string, std::size_t> from;
    std::map<std::string, int> indeg;
    for (auto i : idx) {
        const auto& a = q.atom(i).args;
        if (a[0] == a[1] || from.count(a[0])) return std::nullopt;
        from[a[0]] = i;
        ++indeg[a[1]];
    }
    std::string start;
    int starts = 0;
    for (const auto& [v, i] : from)
        if (!indeg.count(v)) {
            start = v;
            ++starts;
        }
    if (starts != 1) return std::nullopt;
    std::vector<std::size_t> path;
    std::set<std::string> seen{start};
    std::string cur = start;
    while (from.count(cur)) {
        auto i = from[cur];
        path.push_back(i);
        cur = q.atom(i).args[1];
        if (!seen.insert(cur).second) return std::nullopt;
    }
    if (path.size() != idx.size()) return std::nullopt;
    return path;
}

StructuralFinding finding(FindingKind k, std::vector<std::size_t> atoms, std::vector<std::string> vars,
                          std::string cite, std::string detail = {}) {
    return {k, std::move(atoms), std::move(vars), std::move(cite), std::move(detail)};
}

std::string atoms_text(const Query& q, const std::vector<std::size_t>& idx) {
    std::string s;
    for (auto i : idx) s += (s.empty() ? "" : ", ") + format_atom(q, i);
    return s;
}

Classification classify_connected(const Query& m) {
    Classification c;
    c.minimized_query = m;
    c.normalized_query = normalize(m);
    const Query& q = c.normalized_query;
    auto dominated = dominated_relations(m);
    if (!dominated.empty()) {
        std::string s;
        for (const auto& r : dominated) s += (s.empty() ? "" : ",") + r;
        c.notes.push_back("dominated relations made exogenous: " + s);
    }

    for (const auto& t : find_triads(q)) {
        std::vector<std::size_t> a(t.atoms.begin(), t.atoms.end());
        c.findings.push_back(finding(FindingKind::TRIAD, a, {}, "a triad makes resilience NP-complete",
                                     atoms_text(q, a)));
    }
    if (!c.findings.empty()) {
        c.verdict = Verdict::NP_COMPLETE;
        return c;
    }

    std::vector<std::string> rep;
    for (const auto& r : q.repeated_relations())
        if (!q.is_exogenous(r)) rep.push_back(r);
    if (rep.empty()) {
        c.verdict = Verdict::PTIME;
        c.solver_plan = "standard-flow";
        c.notes.push_back("no endogenous self-join and no triad: min-cut over a linear arrangement");
        return c;
    }
    if (rep.size() > 1 || q.max_arity() > 2) {
        c.verdict = Verdict::UNSUPPORTED;
        c.notes.push_back(rep.size() > 1 ? "more than one endogenous self-join relation"
                                         : "self-join query with an atom of arity above 2");
        return c;
    }
    const std::string R = rep[0];
    const int count = q.occurrences(R);

    if (auto p = detect_path(q)) {
        c.findings.push_back(*p);
        c.verdict = Verdict::NP_COMPLETE;
        return c;
    }

    if (count == 2) {
        auto f = detect_2R_pattern(q);
        c.findings.push_back(f);
        switch (f.kind) {
            case FindingKind::CHAIN:
                c.verdict = Verdict::NP_COMPLETE;
                return c;
            case FindingKind::PERMUTATION:
                if (is_bounded_permutation(q)) {
                    c.findings.push_back(finding(FindingKind::BOUNDED_PERMUTATION, f.atoms, f.variables,
                                                 "a bound permutation is NP-complete"));
                    c.verdict = Verdict::NP_COMPLETE;
                    return c;
                }
                c.verdict = Verdict::PTIME;
                if (match_query(parse_query("q :- R(x,y), R(y,x)"), q)) {
                    c.solver_plan = "perm-count";
                } else if (match_query(parse_query("q :- A(x), R(x,y), R(y,x)"), q)) {
                    c.solver_plan = "bipartite-vc";
                } else {
                    c.solver_plan = "exact";
                    c.notes.push_back("unbound permutation without a dedicated solver; exact search used");
                }
                return c;
            case FindingKind::CONFLUENCE:
                if (has_confluence_exogenous_path(q)) {
                    c.findings.push_back(finding(FindingKind::CONFLUENCE_EXO_PATH, f.atoms, f.variables,
                                                 "a confluence with an exogenous path is NP-complete"));
                    c.verdict = Verdict::NP_COMPLETE;
                    return c;
                }
                c.verdict = Verdict::PTIME;
                c.solver_plan = "conf-flow";
                return c;
            case FindingKind::REP: {
                // z3 pattern: a loop R(x,x) next to R(x,y) or R(y,x).
                bool loop = false, other = false;
                for (auto i : f.atoms) (has_repeat(q.atom(i)) ? loop : other) = true;
                if (loop && other) {
                    bool pl = false;
                    try {
                        pl = is_pseudo_linear(q).pseudo_linear;
                    } catch (const QueryError&) {
                    }
                    if (pl) {
                        c.verdict = Verdict::PTIME;
                        c.solver_plan = "rep-z3-flow";
                        c.notes.push_back("pseudo-linear query containing z3");
                        return c;
                    }
                }
                c.verdict = Verdict::UNSUPPORTED;
                c.notes.push_back("REP pattern outside the z3 case");
                return c;
            }
            default: break;
        }
        c.verdict = Verdict::UNSUPPORTED;
        return c;
    }

    if (auto ch = k_chain(q, R)) {
        c.findings.push_back(finding(FindingKind::CHAIN, *ch, {},
                                     "a k-chain as the only self-join is NP-complete",
                                     std::to_string(ch->size()) + "-chain"));
        c.verdict = Verdict::NP_COMPLETE;
        return c;
    }
    if (count == 3) {
        if (const auto* e = catalog_lookup(q)) {
            c.findings.push_back(finding(FindingKind::CATALOG_MATCH, atoms_of(q, R), {}, e->citation, e->name));
            c.verdict = e->verdict;
            c.solver_plan = e->plan;
            return c;
        }
        c.notes.push_back("three R-atoms: not in the known-query catalog");
    } else {
        c.notes.push_back("more than three R-atoms");
    }
    c.verdict = Verdict::UNSUPPORTED;
    return c;
}

}  // namespace

std::optional<StructuralFinding> detect_path(const Query& q) {
    const std::string R = sj_relation(q, "detect_path");
    if (q.max_arity() > 2) throw QueryError("detect_path: precondition violated, query is not binary");
    if (component_indices(q).size() != 1) throw QueryError("detect_path: precondition violated, query is disconnected");
    auto idx = atoms_of(q, R);
    if (q.relation(R).arity == 1) {
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a + 1; b < idx.size(); ++b)
                if (q.atom(idx[a]).args != q.atom(idx[b]).args)
                    return finding(FindingKind::UNARY_PATH, {idx[a], idx[b]},
                                   {q.atom(idx[a]).args[0], q.atom(idx[b]).args[0]},
                                   "two unary atoms of the self-join relation give a path",
                                   atoms_text(q, {idx[a], idx[b]}));
        return std::nullopt;
    }
    // Components of the R-atoms linked by shared variables.
    std::vector<int> comp(idx.size(), -1);
    int nc = 0;
    for (std::size_t s = 0; s < idx.size(); ++s) {
        if (comp[s] >= 0) continue;
        std::vector<std::size_t> st{s};
        comp[s] = nc;
        while (!st.empty()) {
            auto u = st.back();
            st.pop_back();
            for (std::size_t v = 0; v < idx.size(); ++v)
                if (comp[v] < 0 && !disjoint(q.atom_vars(idx[u]), q.atom_vars(idx[v]))) {
                    comp[v] = nc;
                    st.push_back(v);
                }
        }
        ++nc;
    }
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b)
            if (comp[a] != comp[b]) {
                std::vector<std::string> vars = q.atom(idx[a]).args;
                vars.insert(vars.end(), q.atom(idx[b]).args.begin(), q.atom(idx[b]).args.end());
                return finding(FindingKind::BINARY_PATH, {idx[a], idx[b]}, vars,
                               "disjoint R-atoms not linked by R-atoms give a binary path",
                               atoms_text(q, {idx[a], idx[b]}));
            }
    return std::nullopt;
}

StructuralFinding detect_2R_pattern(const Query& q) {
    const std::string R = sj_relation(q, "detect_2R_pattern");
    auto idx = atoms_of(q, R);
    if (idx.size() != 2) throw QueryError("detect_2R_pattern: precondition violated, need exactly two R-atoms");
    const auto& a = q.atom(idx[0]).args;
    const auto& b = q.atom(idx[1]).args;
    std::vector<std::string> shared;
    for (const auto& v : q.atom_vars(idx[0]))
        if (q.atom_vars(idx[1]).count(v)) shared.push_back(v);
    if (shared.empty()) throw QueryError("detect_2R_pattern: precondition violated, R-atoms share no variable");
    const std::vector<std::size_t> at{idx[0], idx[1]};
    const std::string txt = atoms_text(q, at);
    if (has_repeat(q.atom(idx[0])) || has_repeat(q.atom(idx[1])))
        return finding(FindingKind::REP, at, shared, "repeated variable inside an R-atom", txt);
    if (a.size() != 2) throw QueryError("detect_2R_pattern: precondition violated, R is not binary");
    if (shared.size() == 2)
        return finding(FindingKind::PERMUTATION, at, shared, "R-atoms sharing both variables", txt);
    const auto& v = shared[0];
    auto pos = [&](const std::vector<std::string>& t) { return t[0] == v ? 0 : 1; };
    if (pos(a) == pos(b))
        return finding(FindingKind::CONFLUENCE, at, shared, "R-atoms joining in the same attribute", txt);
    return finding(FindingKind::CHAIN, at, shared, "a chain is NP-complete", txt);
}

bool is_bounded_permutation(const Query& q) {
    auto [i, j] = two_atoms(q, "is_bounded_permutation", FindingKind::PERMUTATION);
    (void)j;
    const auto& x = q.atom(i).args[0];
    const auto& y = q.atom(i).args[1];
    const std::string R = q.atom(i).relation;
    bool sx = false, ty = false;
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (q.atom(k).relation == R || q.atom_exogenous(k)) continue;
        auto vs = q.atom_vars(k);
        if (vs.count(x) && !vs.count(y)) sx = true;
        if (vs.count(y) && !vs.count(x)) ty = true;
    }
    return sx && ty;
}

bool has_confluence_exogenous_path(const Query& q) {
    auto [i, j] = two_atoms(q, "has_confluence_exogenous_path", FindingKind::CONFLUENCE);
    auto f = detect_2R_pattern(q);
    const auto& y = f.variables[0];
    auto other = [&](std::size_t k) {
        const auto& a = q.atom(k).args;
        return a[0] == y ? a[1] : a[0];
    };
    const auto x = other(i), z = other(j);
    // Walk over variables through atoms that avoid y.
    std::set<std::string> seen{x};
    std::vector<std::string> st{x};
    while (!st.empty()) {
        auto u = st.back();
        st.pop_back();
        if (u == z) return true;
        for (std::size_t k = 0; k < q.size(); ++k) {
            auto vs = q.atom_vars(k);
            if (vs.count(y) || !vs.count(u)) continue;
            for (const auto& w : vs)
                if (seen.insert(w).second) st.push_back(w);
        }
    }
    return false;
}

Classification classify(const Query& q) {
    Query m = minimize(q);
    auto parts = components(m);
    if (parts.size() == 1) return classify_connected(m);
    Classification c;
    c.minimized_query = m;
    c.normalized_query = normalize(m);
    bool npc = false, open = false, ptime = true;
    for (const auto& p : parts) {
        auto sub = classify_connected(p);
        npc |= sub.verdict == Verdict::NP_COMPLETE;
        open |= sub.verdict == Verdict::OPEN;
        ptime &= sub.verdict == Verdict::PTIME;
        for (const auto& f : sub.findings) {
            auto g = f;
            g.detail = serialize_query(p) + ": " + f.detail;
            g.atoms.clear();
            c.findings.push_back(g);
        }
        c.components.push_back(std::move(sub));
    }
    c.verdict = npc ? Verdict::NP_COMPLETE
                    : open ? Verdict::OPEN
                    : ptime ? Verdict::PTIME
                            : Verdict::UNSUPPORTED;
    if (c.verdict == Verdict::PTIME) c.solver_plan = "per-component";
    c.notes.push_back("disconnected: " + std::to_string(parts.size()) + " components classified separately");
    return c;
}

std::vector<CatalogEntry> parse_catalog(const std::string& text) {
    std::vector<CatalogEntry> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> cols;
        std::size_t p = 0, bar;
        while ((bar = t.find('|', p)) != std::string::npos) {
            cols.push_back(trim(t.substr(p, bar - p)));
            p = bar + 1;
        }
        cols.push_back(trim(t.substr(p)));
        if (cols.size() != 5) throw QueryError("catalog line " + std::to_string(lineno) + ": expected 5 fields");
        auto v = parse_verdict(cols[1]);
        if (!v) throw QueryError("catalog line " + std::to_string(lineno) + ": bad verdict " + cols[1]);
        CatalogEntry e{cols[0], *v, cols[2], cols[3], parse_query(cols[4]), {}};
        e.key = canonical_form(normalize(minimize(e.query)));
        out.push_back(std::move(e));
    }
    return out;
}

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = parse_catalog(kCatalogText);
    return entries;
}

const CatalogEntry* catalog_lookup(const Query& normalized) {
    auto key = canonical_form(normalized);
    for (const auto& e : catalog())
        if (e.key == key) return &e;
    return nullptr;
}

}  // namespace resil
