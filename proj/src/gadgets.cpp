#include "resil/gadgets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "resil/analysis.hpp"
#include "resil/classifier.hpp"
#include "resil/solvers.hpp"

namespace resil {

// ---------------------------------------------------------------------------
// Formulas

CNF parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    CNF f;
    int declared_m = -1, lineno = 0;
    bool header = false;
    std::vector<Literal> cur;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "c" || tok[0] == 'c' || tok[0] == '%') continue;
        if (tok == "p") {
            std::string kind;
            if (header || !(ls >> kind >> f.n >> declared_m) || kind != "cnf" || f.n < 0 || declared_m < 0)
                throw FormatError("line " + std::to_string(lineno) + ": bad problem line");
            header = true;
            continue;
        }
        if (!header) throw FormatError("line " + std::to_string(lineno) + ": clause before 'p cnf' header");
        do {
            long v;
            try {
                std::size_t used = 0;
                v = std::stol(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw FormatError("line " + std::to_string(lineno) + ": bad literal '" + tok + "'");
            }
            if (v == 0) {
                if (cur.empty()) throw FormatError("line " + std::to_string(lineno) + ": empty clause");
                f.clauses.push_back(cur);
                cur.clear();
                continue;
            }
            if (std::labs(v) > f.n)
                throw FormatError("line " + std::to_string(lineno) + ": variable " + tok + " out of range");
            cur.push_back({static_cast<int>(std::labs(v)) - 1, v > 0});
        } while (ls >> tok);
    }
    if (!header) throw FormatError("missing 'p cnf' header");
    if (!cur.empty()) throw FormatError("last clause not terminated by 0");
    if (f.m() != declared_m)
        throw FormatError("header declares " + std::to_string(declared_m) + " clauses, found " +
                          std::to_string(f.m()));
    return f;
}

std::string to_dimacs(const CNF& f) {
    std::ostringstream out;
    out << "p cnf " << f.n << " " << f.m() << "\n";
    for (const auto& c : f.clauses) {
        for (const auto& l : c) out << (l.positive ? "" : "-") << l.var + 1 << " ";
        out << "0\n";
    }
    return out.str();
}

std::string format_cnf(const CNF& f) {
    std::string s;
    for (const auto& c : f.clauses) {
        s += s.empty() ? "(" : " & (";
        for (std::size_t i = 0; i < c.size(); ++i)
            s += (i ? " | " : "") + std::string(c[i].positive ? "" : "!") + "v" + std::to_string(c[i].var + 1);
        s += ")";
    }
    return s.empty() ? "true" : s;
}

namespace {

int satisfied_clauses(const CNF& f, unsigned bits) {
    int cnt = 0;
    for (const auto& c : f.clauses)
        for (const auto& l : c)
            if (((bits >> l.var) & 1u) == (l.positive ? 1u : 0u)) {
                ++cnt;
                break;
            }
    return cnt;
}

}  // namespace

bool brute_force_sat(const CNF& f) { return brute_force_maxsat(f) == f.m(); }

int brute_force_maxsat(const CNF& f) {
    if (f.n > 24) throw FormatError("brute force limited to 24 variables");
    int best = 0;
    for (unsigned bits = 0; bits < (1u << f.n); ++bits) best = std::max(best, satisfied_clauses(f, bits));
    return best;
}

Graph parse_graph(const std::string& text) {
    Graph g;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto node = [&](const std::string& v) {
        if (seen.insert(v).second) g.nodes.push_back(v);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (toks.empty()) continue;
        if (toks.size() > 2) throw FormatError("line " + std::to_string(lineno) + ": expected 'u v'");
        node(toks[0]);
        if (toks.size() == 2) {
            node(toks[1]);
            g.edges.emplace_back(toks[0], toks[1]);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// vc and path reductions

ReductionInstance gen_vc_instance(const Graph& g) {
    if (g.edges.empty()) throw FormatError("vc instance needs at least one edge");
    ReductionInstance inst;
    inst.generator = "vc";
    inst.query = parse_query("q :- R(x), S(x,y), R(y)");
    for (const auto& v : g.nodes) inst.database.add("R", {v});
    for (const auto& [u, v] : g.edges) inst.database.add("S", {u, v});
    inst.claim = ReductionInstance::Claim::EqualsSource;
    inst.source_resilience = resilience_exact(inst.database, inst.query).k;
    inst.k = inst.source_resilience;
    inst.claim_text = "minimum vertex cover of G = rho(vc, D_G)";
    inst.params["nodes"] = std::to_string(g.nodes.size());
    inst.params["edges"] = std::to_string(g.edges.size());
    return inst;
}

namespace {

// Atoms on a shortest path from atom `from` to atom `to` in the dual
// hypergraph whose intermediate atoms avoid relation `rel`.
std::vector<std::size_t> atom_path(const Query& q, std::size_t from, std::size_t to, const std::string& rel) {
    std::vector<int> prev(q.size(), -2);
    std::vector<std::size_t> queue{from};
    prev[from] = -1;
    for (std::size_t h = 0; h < queue.size(); ++h) {
        auto u = queue[h];
        if (u == to) break;
        if (u != from && q.atom(u).relation == rel) continue;
        for (std::size_t v = 0; v < q.size(); ++v) {
            if (prev[v] != -2) continue;
            bool share = false;
            for (const auto& x : q.atom_vars(u))
                if (q.atom_vars(v).count(x)) share = true;
            if (!share) continue;
            if (v != to && q.atom(v).relation == rel) continue;
            prev[v] = static_cast<int>(u);
            queue.push_back(v);
        }
    }
    if (prev[to] == -2) throw QueryError("no path between the two R-atoms avoiding other R-atoms");
    std::vector<std::size_t> out;
    for (int c = static_cast<int>(to); c != -1; c = prev[c]) out.push_back(static_cast<std::size_t>(c));
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace

ReductionInstance gen_path_reduction(const Database& d_vc, const Query& q) {
    auto path = detect_path(q);
    if (!path) throw QueryError("gen_path_reduction: query has no unary or binary path");
    const std::size_t p0 = path->atoms[0], p1 = path->atoms[1];
    const std::string R = q.atom(p0).relation;
    auto on_path = atom_path(q, p0, p1, R);
    std::set<std::size_t> path_set(on_path.begin(), on_path.end());
    std::set<std::string> path_vars;
    for (auto i : on_path)
        for (const auto& v : q.atom(i).args) path_vars.insert(v);

    // Variable classes mapped to a and b.
    std::set<std::string> to_a, to_b;
    if (path->kind == FindingKind::UNARY_PATH) {
        to_a.insert(q.atom(p0).args[0]);
        to_b.insert(q.atom(p1).args[0]);
    } else {
        // R-path equivalence on variables.
        std::map<std::string, std::string> parent;
        std::function<std::string(const std::string&)> find = [&](const std::string& v) {
            auto it = parent.find(v);
            if (it == parent.end() || it->second == v) return v;
            return it->second = find(it->second);
        };
        for (const auto& v : q.variables()) parent[v] = v;
        for (const auto& a : q.atoms())
            if (a.relation == R)
                for (const auto& v : a.args) parent[find(v)] = find(a.args[0]);
        auto cx = find(q.atom(p0).args[0]), cz = find(q.atom(p1).args[0]);
        for (const auto& v : q.variables()) {
            if (find(v) == cx) to_a.insert(v);
            if (find(v) == cz) to_b.insert(v);
        }
    }

    const Query vc = parse_query("q :- R(x), S(x,y), R(y)");
    check_arities(d_vc, vc);
    auto ws = enumerate_witnesses(d_vc, vc);
    if (ws.witnesses.empty()) throw FormatError("gen_path_reduction: source database does not satisfy vc");
    const std::size_t pad = d_vc.constants().size();

    ReductionInstance inst;
    inst.generator = path->kind == FindingKind::UNARY_PATH ? "unary-path" : "binary-path";
    inst.query = q;
    for (const auto& w : ws.witnesses) {
        const auto& a = w.values[0];  // x
        const auto& b = w.values[1];  // y
        auto t = [&](const std::string& v) {
            if (to_a.count(v)) return a;
            if (to_b.count(v)) return b;
            return "<" + a + "," + b + ">" + v;
        };
        for (std::size_t i = 0; i < q.size(); ++i) {
            const auto& atom = q.atom(i);
            std::vector<std::vector<std::string>> choices;
            for (const auto& v : atom.args) {
                std::vector<std::string> vals{t(v)};
                // Off-path variables get extra values, so cutting there never pays.
                if (!path_set.count(i) && !path_vars.count(v))
                    for (std::size_t k = 1; k <= pad; ++k)
                        vals.push_back("<" + a + "," + b + ">" + v + "#" + std::to_string(k));
                choices.push_back(std::move(vals));
            }
            std::vector<std::string> tuple(atom.args.size());
            std::function<void(std::size_t)> rec = [&](std::size_t k) {
                if (k == choices.size()) {
                    inst.database.add(atom.relation, tuple);
                    return;
                }
                for (const auto& c : choices[k]) {
                    tuple[k] = c;
                    rec(k + 1);
                }
            };
            rec(0);
        }
    }
    inst.claim = ReductionInstance::Claim::EqualsSource;
    inst.source_resilience = resilience_exact(d_vc, vc).k;
    inst.k = inst.source_resilience;
    inst.claim_text = "rho(q, D') = rho(vc, D)";
    inst.params["path"] = format_atom(q, p0) + " .. " + format_atom(q, p1);
    inst.params["padding"] = std::to_string(pad);
    return inst;
}

// ---------------------------------------------------------------------------
// 3SAT gadgets

namespace {

std::string V(int v, int j) { return "v" + std::to_string(v + 1) + "_" + std::to_string(j); }
std::string NV(int v, int j) { return "nv" + std::to_string(v + 1) + "_" + std::to_string(j); }

void require_3cnf(const CNF& f) {
    if (f.clauses.empty()) throw FormatError("formula has no clauses");
    for (const auto& c : f.clauses)
        if (c.size() != 3) throw FormatError("3CNF clauses need exactly 3 literals");
}

// The 2-chain database: variable cycles v_j -> nv_j -> v_{j+1} of length 2m and
// one clause triangle a->b->c->a per clause, each corner fed by its literal.
Database chain_database(const CNF& f) {
    const int m = f.m();
    Database d;
    for (int v = 0; v < f.n; ++v)
        for (int j = 0; j < m; ++j) {
            d.add("R", {V(v, j), NV(v, j)});
            d.add("R", {NV(v, j), V(v, (j + 1) % m)});
        }
    for (int j = 0; j < m; ++j) {
        std::string pre = "k" + std::to_string(j + 1);
        std::string a = pre + "a", b = pre + "b", c = pre + "c";
        d.add("R", {a, b});
        d.add("R", {b, c});
        d.add("R", {c, a});
        const std::string corner[3] = {a, b, c};
        for (int p = 0; p < 3; ++p) {
            const auto& l = f.clauses[j][p];
            const auto& x = corner[p];
            d.add("R", {x + "'", x});
            d.add("R", {l.positive ? NV(l.var, j) : V(l.var, (j + 1) % m), x + "'"});
        }
    }
    return d;
}

std::string G(int v, int j, int m, bool bar) { return bar ? NV(v, j % m) : V(v, j % m); }

Database chain_a_database(const CNF& f, bool with_b) {
    const int m = f.m();
    Database d;
    for (int v = 0; v < f.n; ++v)
        for (int j = 0; j < m; ++j) {
            auto x = G(v, j, m, false), xb = G(v, j, m, true), xn = G(v, j + 1, m, false);
            d.add("R", {x, xb});
            d.add("R", {xb, xn});
            d.add("A", {x});
            d.add("A", {xb});
            if (with_b) {
                d.add("B", {x});
                d.add("B", {xb});
            }
        }
    for (int j = 0; j < m; ++j) {
        std::string pre = "k" + std::to_string(j + 1);
        const std::string corner[3] = {pre + "a", pre + "b", pre + "c"};
        d.add("R", {corner[0], corner[1]});
        d.add("R", {corner[1], corner[2]});
        d.add("R", {corner[2], corner[0]});
        for (int p = 0; p < 3; ++p) {
            const auto& l = f.clauses[j][p];
            const auto& x = corner[p];
            d.add("R", {x + "'", x});
            d.add("A", {x});
            d.add("A", {x + "'"});
            d.add("R", {x + "''", x + "'"});
            d.add("A", {x + "''"});
            d.add("R", {x + "''", G(l.var, j, m, !l.positive)});
            if (with_b) {
                d.add("B", {x});
                d.add("B", {x + "'"});
            }
        }
    }
    return d;
}

Database chain_ac_database(const CNF& f, bool with_b) {
    const int m = f.m();
    Database d;
    for (int v = 0; v < f.n; ++v)
        for (int j = 0; j < m; ++j) {
            auto x = G(v, j, m, false), xb = G(v, j, m, true), xn = G(v, j + 1, m, false);
            d.add("R", {x, xb});
            d.add("R", {xb, xn});
            for (const auto& t : {x, xb}) {
                d.add("A", {t});
                d.add("C", {t});
            }
            if (with_b) {
                d.add("B", {x});
                d.add("B", {xb});
            }
        }
    for (int j = 0; j < m; ++j) {
        std::string pre = "k" + std::to_string(j + 1);
        const std::string corner[3] = {pre + "a", pre + "b", pre + "c"};
        d.add("R", {corner[0], corner[1]});
        d.add("R", {corner[1], corner[2]});
        d.add("R", {corner[2], corner[0]});
        for (int p = 0; p < 3; ++p) {
            const auto& l = f.clauses[j][p];
            const auto& x = corner[p];
            const std::string st = x + "*";
            d.add("R", {x + "'", x});
            d.add("A", {x});
            d.add("A", {x + "'"});
            d.add("C", {x});
            d.add("R", {x + "'", st});
            d.add("R", {st, x + "''"});
            d.add("C", {x + "''"});
            d.add("R", {G(l.var, j, m, l.positive), x + "''"});
            if (with_b) {
                d.add("B", {x});
                d.add("B", {st});
            }
        }
    }
    return d;
}

// Reverses every tuple and renames relations: the c-variants mirror the a-variants.
Database mirrored(const Database& d, const std::map<std::string, std::string>& ren) {
    Database out;
    for (const auto& [rel, ts] : d.relations()) {
        auto it = ren.find(rel);
        const std::string name = it == ren.end() ? rel : it->second;
        for (auto t : ts) {
            std::reverse(t.begin(), t.end());
            out.add(name, t);
        }
    }
    return out;
}

ReductionInstance sat_instance(const std::string& gen, const Query& q, Database d, int k, const CNF& f,
                               const std::string& kform) {
    ReductionInstance inst;
    inst.generator = gen;
    inst.query = q;
    inst.database = std::move(d);
    inst.k = k;
    inst.claim = ReductionInstance::Claim::SatIffAtMostK;
    inst.claim_text = "psi satisfiable <=> rho <= k, k = " + kform;
    inst.formula = f;
    inst.params["n"] = std::to_string(f.n);
    inst.params["m"] = std::to_string(f.m());
    return inst;
}

}  // namespace

const std::vector<std::string>& chain_unary_variants() {
    static const std::vector<std::string> v{"a", "b", "c", "ab", "bc", "ac", "abc"};
    return v;
}

Query chain_unary_query(const std::string& variant) {
    static const std::map<std::string, std::string> q{
        {"a", "q :- A(x), R(x,y), R(y,z)"},
        {"b", "q :- R(x,y), B(y), R(y,z)"},
        {"c", "q :- R(x,y), R(y,z), C(z)"},
        {"ab", "q :- A(x), R(x,y), B(y), R(y,z)"},
        {"bc", "q :- R(x,y), B(y), R(y,z), C(z)"},
        {"ac", "q :- A(x), R(x,y), R(y,z), C(z)"},
        {"abc", "q :- A(x), R(x,y), B(y), R(y,z), C(z)"},
    };
    auto it = q.find(variant);
    if (it == q.end()) throw FormatError("unknown chain variant '" + variant + "'");
    return parse_query(it->second);
}

ReductionInstance gen_chain_3sat(const CNF& f) {
    require_3cnf(f);
    const auto& cal = chain_calibration();
    auto inst = sat_instance("chain", parse_query("q :- R(x,y), R(y,z)"), chain_database(f),
                             static_cast<int>(cal.k(f.n, f.m())), f, "calibrated " + cal.matches);
    inst.params["calibration"] = std::to_string(cal.alpha) + "nm + " + std::to_string(cal.beta) + "m + " +
                                 std::to_string(cal.gamma) + "n + " + std::to_string(cal.delta);
    inst.params["variable_cycle_nodes"] = std::to_string(2 * f.m());
    return inst;
}

ReductionInstance gen_chain_unary_3sat(const CNF& f, const std::string& variant) {
    require_3cnf(f);
    Query q = chain_unary_query(variant);
    Database d;
    if (variant == "a") {
        d = chain_a_database(f, false);
    } else if (variant == "ab") {
        d = chain_a_database(f, true);
    } else if (variant == "c") {
        d = mirrored(chain_a_database(f, false), {{"A", "C"}});
    } else if (variant == "bc") {
        d = mirrored(chain_a_database(f, true), {{"A", "C"}});
    } else if (variant == "ac") {
        d = chain_ac_database(f, false);
    } else if (variant == "abc") {
        d = chain_ac_database(f, true);
    } else {
        // b: the chain gadget with B on every node that is both a head and a tail.
        d = chain_database(f);
        std::set<std::string> heads, tails;
        for (const auto& t : d.tuples("R")) {
            heads.insert(t[0]);
            tails.insert(t[1]);
        }
        for (const auto& c : heads)
            if (tails.count(c)) d.add("B", {c});
    }
    return sat_instance("chain-" + variant, q, std::move(d), (f.n + 5) * f.m(), f, "(n+5)m");
}

ReductionInstance gen_triangle_3sat(const CNF& f) {
    require_3cnf(f);
    const int m = f.m(), L = 4 * m;
    // Nodes (variable, kind, segment) merged by clause identification.
    using Node = std::tuple<int, char, int>;
    std::map<Node, Node> parent;
    std::function<Node(const Node&)> find = [&](const Node& x) -> Node {
        auto it = parent.find(x);
        if (it == parent.end() || it->second == x) return x;
        return it->second = find(it->second);
    };
    auto unite = [&](const Node& a, const Node& b) {
        auto ra = find(a), rb = find(b);
        if (ra != rb) parent[ra] = rb;
    };
    auto next = [&](int t) { return t % L + 1; };
    std::vector<std::tuple<std::string, Node, Node>> edges;
    for (int i = 0; i < f.n; ++i)
        for (int t = 1; t <= L; ++t) {
            Node a{i, 'a', t}, b{i, 'b', t}, c{i, 'c', t}, an{i, 'a', next(t)}, bn{i, 'b', next(t)};
            edges.emplace_back("R", a, b);
            edges.emplace_back("S", b, c);
            edges.emplace_back("T", c, an);
            edges.emplace_back("T", c, a);
            edges.emplace_back("R", an, b);
            edges.emplace_back("S", bn, c);
        }
    for (int j = 0; j < m; ++j) {
        const auto& cl = f.clauses[j];
        // Literal p takes the clause's R, S or T edge from its segment:
        // positive literals use the odd segment 4j+1 for R and T, 4j+2 for S.
        int slot[3];
        slot[0] = cl[0].positive ? 4 * j + 1 : 4 * j + 2;
        slot[1] = cl[1].positive ? 4 * j + 2 : 4 * j + 1;
        slot[2] = cl[2].positive ? 4 * j + 1 : 4 * j + 2;
        const int v1 = cl[0].var, v2 = cl[1].var, v3 = cl[2].var;
        unite({v1, 'b', slot[0]}, {v2, 'b', slot[1]});
        unite({v2, 'c', slot[1]}, {v3, 'c', slot[2]});
        unite({v3, 'a', next(slot[2])}, {v1, 'a', slot[0]});
    }
    auto name = [&](const Node& x) {
        auto r = find(x);
        return "v" + std::to_string(std::get<0>(r) + 1) + std::get<1>(r) + std::to_string(std::get<2>(r));
    };
    Database d;
    for (const auto& [rel, x, y] : edges) d.add(rel, {name(x), name(y)});
    auto inst = sat_instance("triangle", parse_query("q :- R(x,y), S(y,z), T(z,x)"), std::move(d), 6 * m * f.n,
                             f, "6mn");
    inst.params["segments_per_variable"] = std::to_string(L);
    return inst;
}

ReductionInstance gen_permAB_3sat(const CNF& f) {
    require_3cnf(f);
    const int m = f.m();
    Database d;
    auto AB = [&](const std::string& x) {
        d.add("A", {x});
        d.add("B", {x});
    };
    auto RR = [&](const std::string& x, const std::string& y) {
        d.add("R", {x, y});
        d.add("R", {y, x});
    };
    for (int v = 0; v < f.n; ++v)
        for (int j = 0; j < m; ++j) {
            auto x = V(v, j), xb = NV(v, j), xn = V(v, (j + 1) % m);
            AB(x);
            AB(xb);
            RR(x, xb);
            RR(xn, xb);
            auto s = "s" + std::to_string(v + 1) + "_" + std::to_string(j);
            auto sb = "ns" + std::to_string(v + 1) + "_" + std::to_string(j);
            AB(s);
            AB(sb);
            RR(s, x);
            RR(sb, xb);
        }
    for (int j = 0; j < m; ++j) {
        std::string pre = "k" + std::to_string(j + 1);
        const std::string corner[3] = {pre + "a", pre + "b", pre + "c"};
        for (const auto& x : corner) {
            AB(x);
            AB(x + "'");
            RR(x, x + "'");
        }
        RR(corner[0], corner[1]);
        RR(corner[1], corner[2]);
        RR(corner[2], corner[0]);
        for (int p = 0; p < 3; ++p) {
            const auto& l = f.clauses[j][p];
            RR(l.positive ? V(l.var, j) : NV(l.var, j), corner[p]);
        }
    }
    return sat_instance("permAB", parse_query("q :- A(x), R(x,y), R(y,x), B(y)"), std::move(d),
                        (3 * f.n + 5) * m, f, "(3n+5)m");
}

// ---------------------------------------------------------------------------
// Max 2SAT for the bounded 3-confluence

ReductionInstance gen_3confAC_max2sat(const CNF& f, int r) {
    for (const auto& c : f.clauses)
        if (c.empty() || c.size() > 2) throw FormatError("Max2SAT clauses need 1 or 2 literals");
    if (r < 0 || r > f.m()) throw FormatError("target r must lie in [0, m]");
    Database d;
    auto A = [&](const std::string& c) { d.add("A", {c}); };
    auto C = [&](const std::string& c) { d.add("C", {c}); };
    auto R = [&](const std::string& a, const std::string& b) { d.add("R", {a, b}); };

    std::vector<int> occ(f.n, 0), S(f.n);
    for (const auto& c : f.clauses)
        for (const auto& l : c) ++occ[l.var];
    for (int v = 0; v < f.n; ++v) S[v] = std::max(2, occ[v]);
    auto X = [](int v, int i) { return "x" + std::to_string(v + 1) + "_" + std::to_string(i); };
    auto NX = [](int v, int i) { return "nx" + std::to_string(v + 1) + "_" + std::to_string(i); };

    for (int v = 0; v < f.n; ++v) {
        const int s = S[v];
        const std::string tag = std::to_string(v + 1);
        // Top half: A(x_i), C(nx_i); bottom half: A(nx_i), C(x_i).
        for (int i = 1; i <= s; ++i) {
            A(X(v, i));
            C(NX(v, i));
        }
        for (int i = s + 1; i <= 2 * s; ++i) {
            A(NX(v, i));
            C(X(v, i));
        }
        int links = 0;
        // a -R-> g <-R- g' -R-> c : a 3-confluence from A(a) to C(c).
        auto link = [&](const std::string& a, const std::string& c) {
            ++links;
            auto g = "g" + tag + "_" + std::to_string(links), gp = "g'" + tag + "_" + std::to_string(links);
            R(a, g);
            R(gp, g);
            R(gp, c);
        };
        for (int i = 1; i <= s; ++i) link(X(v, i), NX(v, i));
        for (int i = 1; i < s; ++i) link(X(v, i + 1), NX(v, i));
        for (int i = s + 1; i <= 2 * s; ++i) link(NX(v, i), X(v, i));
        for (int i = s + 1; i < 2 * s; ++i) link(NX(v, i + 1), X(v, i));
        // Crossover between the halves.
        auto cross = [&](const std::string& k, const std::string& a_end, const std::string& c_end,
                         const std::string& a_start, const std::string& c_start) {
            R(a_end, c_start);
            R(a_start, c_end);
            auto nm = [&](const char* z) { return k + z + tag; };
            A(nm("a"));
            R(nm("a"), nm("a'"));
            R(a_end, nm("a'"));
            R(nm("c'"), c_start);
            R(nm("c'"), nm("c"));
            C(nm("c"));
            A(nm("b"));
            R(nm("b"), nm("b'"));
            R(a_start, nm("b'"));
            R(nm("d'"), c_end);
            R(nm("d'"), nm("d"));
            C(nm("d"));
        };
        cross("K1", X(v, s), NX(v, s), NX(v, s + 1), X(v, s + 1));
        cross("K2", NX(v, 2 * s), X(v, 2 * s), X(v, 1), NX(v, 1));
    }
    // Literal copies: A-side nodes for positive literals sit in the top half.
    auto copies = [&](const Literal& l, bool a_side) {
        std::vector<std::string> out;
        const int s = S[l.var];
        if (a_side) {
            for (int i = l.positive ? 1 : s + 1; i <= (l.positive ? s : 2 * s); ++i)
                out.push_back(l.positive ? X(l.var, i) : NX(l.var, i));
        } else {
            for (int i = l.positive ? s + 1 : 1; i <= (l.positive ? 2 * s : s); ++i)
                out.push_back(l.positive ? X(l.var, i) : NX(l.var, i));
        }
        return out;
    };
    int hc = 0;
    auto plink = [&](const std::string& a, const std::string& c) {
        ++hc;
        auto h = "h" + std::to_string(hc), hp = "h'" + std::to_string(hc);
        R(a, h);
        R(hp, h);
        R(hp, c);
    };
    int dcount = 0;
    for (int j = 0; j < f.m(); ++j) {
        const auto& c = f.clauses[j];
        const std::string tag = std::to_string(j + 1);
        if (c.size() == 1) {
            auto one = "k" + tag;
            C(one);
            for (const auto& x : copies(c[0], true)) plink(x, one);
        } else {
            ++dcount;
            auto five = "k" + tag, a = "k" + tag + "a", b = "k" + tag + "b";
            C(five);
            A(five);
            R(five, a);
            R(b, a);
            R(b, five);
            for (const auto& x : copies(c[0], true)) plink(x, five);
            for (const auto& y : copies(c[1], false)) plink(five, y);
        }
    }
    int base = dcount;
    for (int v = 0; v < f.n; ++v) base += 2 * S[v] + 2;
    ReductionInstance inst;
    inst.generator = "3confAC";
    inst.query = parse_query("q :- A(x), R(x,y), R(z,y), R(z,w), C(w)");
    inst.database = std::move(d);
    inst.k = base + f.m() - r;
    inst.r = r;
    inst.formula = f;
    inst.claim = ReductionInstance::Claim::MaxSatIffAtMostK;
    inst.claim_text = "at least r clauses satisfiable <=> rho <= k, k = sum(2s+2) + d + m - r";
    inst.params["n"] = std::to_string(f.n);
    inst.params["m"] = std::to_string(f.m());
    inst.params["d"] = std::to_string(dcount);
    std::string ss;
    for (int v = 0; v < f.n; ++v) ss += (v ? "," : "") + std::to_string(S[v]);
    inst.params["s"] = ss;
    return inst;
}

// ---------------------------------------------------------------------------
// Verification

std::string to_string(VerifyResult::Verdict v) {
    switch (v) {
        case VerifyResult::Verdict::Match: return "match";
        case VerifyResult::Verdict::Mismatch: return "mismatch";
        case VerifyResult::Verdict::Unverified: return "unverified";
    }
    return "?";
}

VerifyResult verify_reduction(const ReductionInstance& inst, const VerifyOptions& opt) {
    VerifyResult res;
    res.k = inst.k;
    if (inst.formula && inst.formula->n > opt.max_vars) {
        res.detail = "formula has " + std::to_string(inst.formula->n) + " variables, limit " +
                     std::to_string(opt.max_vars);
        return res;
    }
    if (inst.database.size() > opt.max_facts) {
        res.detail = "database has " + std::to_string(inst.database.size()) + " facts, limit " +
                     std::to_string(opt.max_facts);
        return res;
    }
    auto r = resilience_exact(inst.database, inst.query);
    if (!r.feasible()) {
        res.verdict = VerifyResult::Verdict::Mismatch;
        res.detail = "instance has an all-exogenous witness";
        return res;
    }
    res.rho = r.k;
    bool ok = false;
    switch (inst.claim) {
        case ReductionInstance::Claim::SatIffAtMostK:
            res.satisfiable = brute_force_sat(*inst.formula);
            res.rho_equals_k = res.rho == inst.k;
            ok = res.satisfiable == (res.rho <= inst.k);
            res.detail = std::string(res.satisfiable ? "satisfiable" : "unsatisfiable") + ", rho " +
                         std::to_string(res.rho) + ", k " + std::to_string(inst.k);
            break;
        case ReductionInstance::Claim::MaxSatIffAtMostK:
            res.maxsat = brute_force_maxsat(*inst.formula);
            res.satisfiable = res.maxsat == inst.formula->m();
            res.rho_equals_k = res.rho == inst.k + inst.r - res.maxsat;
            ok = (res.maxsat >= inst.r) == (res.rho <= inst.k);
            res.detail = "max satisfied " + std::to_string(res.maxsat) + " of " + std::to_string(inst.formula->m()) +
                         ", r " + std::to_string(inst.r) + ", rho " + std::to_string(res.rho) + ", k " +
                         std::to_string(inst.k);
            break;
        case ReductionInstance::Claim::EqualsSource:
            ok = res.rho == inst.source_resilience;
            res.rho_equals_k = ok;
            res.detail = "rho " + std::to_string(res.rho) + ", source " + std::to_string(inst.source_resilience);
            break;
    }
    res.verdict = ok ? VerifyResult::Verdict::Match : VerifyResult::Verdict::Mismatch;
    return res;
}

// ---------------------------------------------------------------------------
// Formula enumeration

namespace {

std::vector<CNF> enumerate(int n, int m, const std::vector<std::vector<Literal>>& clause_pool) {
    std::vector<std::vector<int>> perms;
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));

    auto image = [&](const std::vector<std::vector<Literal>>& cls, const std::vector<int>& perm, unsigned flips) {
        std::vector<std::vector<Literal>> out = cls;
        for (auto& c : out)
            for (auto& l : c) {
                bool flip = (flips >> l.var) & 1u;
                l = {perm[l.var], flip ? !l.positive : l.positive};
            }
        std::sort(out.begin(), out.end());
        return out;
    };

    std::vector<CNF> out;
    std::vector<std::size_t> idx(m, 0);
    std::function<void(int, std::size_t)> rec = [&](int pos, std::size_t from) {
        if (pos == m) {
            std::vector<std::vector<Literal>> cls;
            std::set<int> used;
            for (auto i : idx) {
                cls.push_back(clause_pool[i]);
                for (const auto& l : clause_pool[i]) used.insert(l.var);
            }
            if (static_cast<int>(used.size()) != n) return;
            std::sort(cls.begin(), cls.end());
            for (const auto& pm : perms)
                for (unsigned fl = 0; fl < (1u << n); ++fl)
                    if (image(cls, pm, fl) < cls) return;
            out.push_back({n, cls});
            return;
        }
        for (std::size_t i = from; i < clause_pool.size(); ++i) {
            idx[pos] = i;
            rec(pos + 1, i);
        }
    };
    if (m >= 1) rec(0, 0);
    return out;
}

std::vector<Literal> literals(int n) {
    std::vector<Literal> out;
    for (int v = 0; v < n; ++v) {
        out.push_back({v, true});
        out.push_back({v, false});
    }
    return out;
}

}  // namespace

std::vector<CNF> enumerate_3cnf(int n, int m) {
    std::vector<std::vector<Literal>> pool;
    auto lits = literals(n);
    for (const auto& a : lits)
        for (const auto& b : lits)
            for (const auto& c : lits) pool.push_back({a, b, c});
    std::sort(pool.begin(), pool.end());
    return enumerate(n, m, pool);
}

std::vector<CNF> enumerate_2cnf(int n, int m) {
    std::vector<std::vector<Literal>> pool;
    auto lits = literals(n);
    for (const auto& a : lits) pool.push_back({a});
    for (const auto& a : lits)
        for (const auto& b : lits) pool.push_back({a, b});
    std::sort(pool.begin(), pool.end());
    return enumerate(n, m, pool);
}

// ---------------------------------------------------------------------------
// Chain calibration

ChainCalibration calibrate_chain(const std::vector<std::pair<int, int>>& sizes, int samples_per_size) {
    ChainCalibration cal;
    const Query q = parse_query("q :- R(x,y), R(y,z)");
    struct Point {
        int n, m;
        long rho;
    };
    std::vector<Point> sat_pts;
    std::vector<Point> unsat_pts;
    bool agree = true;
    for (const auto& [n, m] : sizes) {
        auto fs = enumerate_3cnf(n, m);
        std::set<long> sat_vals;
        long min_unsat = -1;
        int taken_sat = 0, taken_unsat = 0;
        for (const auto& f : fs) {
            bool sat = brute_force_sat(f);
            if (sat ? taken_sat >= samples_per_size : taken_unsat >= samples_per_size) continue;
            (sat ? taken_sat : taken_unsat)++;
            long rho = resilience_exact(chain_database(f), q).k;
            if (sat) {
                sat_vals.insert(rho);
                sat_pts.push_back({n, m, rho});
            } else {
                unsat_pts.push_back({n, m, rho});
                min_unsat = min_unsat < 0 ? rho : std::min(min_unsat, rho);
            }
            if (taken_sat >= samples_per_size && taken_unsat >= samples_per_size) break;
        }
        if (sat_vals.size() > 1) agree = false;
        std::string line = "n=" + std::to_string(n) + " m=" + std::to_string(m) + " sat rho {";
        for (auto v : sat_vals) line += " " + std::to_string(v);
        line += " } min unsat rho " + (min_unsat < 0 ? std::string("-") : std::to_string(min_unsat));
        cal.log.push_back(line);
    }
    // Least squares on the normal equations, then round and check exactly.
    double M[4][5] = {};
    for (const auto& p : sat_pts) {
        double row[4] = {double(p.n) * p.m, double(p.m), double(p.n), 1.0};
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) M[i][j] += row[i] * row[j];
            M[i][4] += row[i] * p.rho;
        }
    }
    bool singular = false;
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::fabs(M[r][c]) > std::fabs(M[piv][c])) piv = r;
        if (std::fabs(M[piv][c]) < 1e-9) {
            singular = true;
            break;
        }
        std::swap(M[c], M[piv]);
        for (int r = 0; r < 4; ++r) {
            if (r == c) continue;
            double fct = M[r][c] / M[c][c];
            for (int k = c; k < 5; ++k) M[r][k] -= fct * M[c][k];
        }
    }
    if (!singular) {
        cal.alpha = std::lround(M[0][4] / M[0][0]);
        cal.beta = std::lround(M[1][4] / M[1][1]);
        cal.gamma = std::lround(M[2][4] / M[2][2]);
        cal.delta = std::lround(M[3][4] / M[3][3]);
    }
    bool fits = !singular && agree;
    for (const auto& p : sat_pts) fits = fits && cal.k(p.n, p.m) == p.rho;
    cal.consistent = fits;
    cal.discriminates = true;
    for (const auto& p : unsat_pts) cal.discriminates = cal.discriminates && p.rho > cal.k(p.n, p.m);
    if (cal.alpha == 1 && cal.beta == 5 && cal.gamma == 0 && cal.delta == 0)
        cal.matches = "(n+5)m";
    else if (cal.alpha == 2 && cal.beta == 5 && cal.gamma == 0 && cal.delta == 0)
        cal.matches = "(2n+5)m";
    else
        cal.matches = "neither";
    return cal;
}

const ChainCalibration& chain_calibration() {
    static const ChainCalibration cal = calibrate_chain({{1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 2}, {2, 3}}, 4);
    return cal;
}

}  // namespace resil
