#include "resil/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <set>

#include "resil/classifier.hpp"
#include "resil/hitting_set.hpp"

namespace resil {

namespace shapes {
const Query& q_perm() {
    static const Query q = parse_query("q :- R(x,y), R(y,x)");
    return q;
}
const Query& q_perm_A() {
    static const Query q = parse_query("q :- A(x), R(x,y), R(y,x)");
    return q;
}
const Query& q_conf_AC() {
    static const Query q = parse_query("q :- A(x), R(x,y), R(z,y), C(z)");
    return q;
}
const Query& q_3perm_A() {
    static const Query q = parse_query("q :- A(x), R(x,y), R(y,z), R(z,y)");
    return q;
}
const Query& q_3perm_Swx() {
    static const Query q = parse_query("q :- S(w,x), R(x,y), R(y,z), R(z,y)");
    return q;
}
const Query& q_3conf_TS() {
    static const Query q = parse_query("q :- T^x(x,y), R(x,y), R(z,y), R(z,w), S^x(z,w)");
    return q;
}
}  // namespace shapes

namespace {

std::vector<Fact> query_facts(const Database& d, const Query& q) {
    std::vector<Fact> out;
    for (const auto& [name, decl] : q.relations())
        for (const auto& t : d.tuples(name)) out.push_back({name, t});
    std::sort(out.begin(), out.end());
    return out;
}

int fact_index(const std::vector<Fact>& facts, const Fact& f) {
    auto it = std::lower_bound(facts.begin(), facts.end(), f);
    if (it == facts.end() || !(*it == f)) return -1;
    return static_cast<int>(it - facts.begin());
}

std::vector<Fact> sorted_unique(std::vector<Fact> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// ---------------------------------------------------------------------------
// Layered flow over a linear arrangement of atoms.

struct FlowTuple {
    std::vector<std::string> vals;
    int fact;  // index into the caller's fact table, -1 if none
    bool endo;
};

struct FlowAtom {
    std::vector<std::string> args;
    std::vector<FlowTuple> tuples;
};

struct CutOutcome {
    bool feasible = true;
    long long value = 0;
    std::vector<int> facts;  // distinct cut facts
    bool duplicates = false;
};

bool bind(const std::vector<std::string>& args, const std::vector<std::string>& vals,
          std::map<std::string, std::string>& asg) {
    for (std::size_t k = 0; k < args.size(); ++k) {
        auto [it, fresh] = asg.try_emplace(args[k], vals[k]);
        if (!fresh && it->second != vals[k]) return false;
    }
    return true;
}

CutOutcome linear_cut(const std::vector<FlowAtom>& atoms) {
    const std::size_t m = atoms.size();
    std::vector<std::vector<std::string>> sep(m + 1);
    for (std::size_t i = 1; i < m; ++i) {
        std::set<std::string> left, right;
        for (std::size_t j = 0; j < i; ++j) left.insert(atoms[j].args.begin(), atoms[j].args.end());
        for (std::size_t j = i; j < m; ++j) right.insert(atoms[j].args.begin(), atoms[j].args.end());
        std::set_intersection(left.begin(), left.end(), right.begin(), right.end(),
                              std::back_inserter(sep[i]));
    }
    FlowNetwork net(2, 0, 1);
    std::vector<std::map<std::vector<std::string>, int>> nodes(m + 1);
    auto node = [&](std::size_t layer, const std::vector<std::string>& key) {
        if (layer == 0) return net.source();
        if (layer == m) return net.sink();
        auto [it, fresh] = nodes[layer].try_emplace(key, -1);
        if (fresh) it->second = net.add_node();
        return it->second;
    };
    for (std::size_t i = 0; i < m; ++i) {
        for (const auto& t : atoms[i].tuples) {
            std::map<std::string, std::string> asg;
            if (!bind(atoms[i].args, t.vals, asg)) continue;
            std::vector<std::string> kin, kout;
            for (const auto& v : sep[i]) kin.push_back(asg.at(v));
            for (const auto& v : sep[i + 1]) kout.push_back(asg.at(v));
            net.add_edge(node(i, kin), node(i + 1, kout), t.endo ? 1 : FlowNetwork::kUnbounded,
                         t.fact);
        }
    }
    CutOutcome out;
    auto cut = net.min_cut();
    if (!cut) {
        out.feasible = false;
        return out;
    }
    out.value = cut->value;
    for (int e : cut->edges) out.facts.push_back(net.edges()[e].tag);
    std::sort(out.facts.begin(), out.facts.end());
    auto before = out.facts.size();
    out.facts.erase(std::unique(out.facts.begin(), out.facts.end()), out.facts.end());
    out.duplicates = before != out.facts.size();
    return out;
}

struct Block {
    std::vector<std::size_t> atoms;
    std::vector<std::string> vars;
};

// Linear arrangement of q, merging groups of exogenous atoms into single
// exogenous atoms (their join) when q itself is not linear.
std::optional<std::vector<Block>> linearize(const Query& q) {
    std::vector<std::size_t> exo, endo;
    for (std::size_t i = 0; i < q.size(); ++i) (q.atom_exogenous(i) ? exo : endo).push_back(i);
    // Restricted growth strings over the exogenous atoms; the all-singleton
    // partition comes last in this order, so try it first.
    std::vector<std::vector<int>> partitions;
    std::vector<int> rgs(exo.size(), 0);
    std::function<void(std::size_t, int)> gen = [&](std::size_t i, int mx) {
        if (i == exo.size()) {
            partitions.push_back(rgs);
            return;
        }
        for (int b = 0; b <= mx + 1; ++b) {
            rgs[i] = b;
            gen(i + 1, std::max(mx, b));
        }
    };
    gen(0, -1);
    std::reverse(partitions.begin(), partitions.end());
    for (const auto& p : partitions) {
        std::vector<Block> blocks;
        for (auto i : endo) blocks.push_back({{i}, q.atom(i).args});
        int nb = 0;
        for (int b : p) nb = std::max(nb, b + 1);
        for (int b = 0; b < nb; ++b) {
            Block blk;
            for (std::size_t k = 0; k < exo.size(); ++k)
                if (p[k] == b) {
                    blk.atoms.push_back(exo[k]);
                    for (const auto& v : q.atom(exo[k]).args)
                        if (std::find(blk.vars.begin(), blk.vars.end(), v) == blk.vars.end())
                            blk.vars.push_back(v);
                }
            blocks.push_back(std::move(blk));
        }
        std::vector<Atom> fake;
        for (std::size_t i = 0; i < blocks.size(); ++i)
            fake.push_back({"B" + std::to_string(i), blocks[i].vars});
        auto order = linear_order(Query(fake, {}));
        if (order) {
            std::vector<Block> out;
            for (auto i : *order) out.push_back(blocks[i]);
            return out;
        }
    }
    return std::nullopt;
}

FlowAtom materialize(const Query& q, const Block& b,
                     const std::vector<std::vector<FlowTuple>>& sources) {
    FlowAtom fa;
    fa.args = b.vars;
    if (b.atoms.size() == 1) {
        fa.args = q.atom(b.atoms[0]).args;
        fa.tuples = sources[b.atoms[0]];
        return fa;
    }
    std::set<std::vector<std::string>> seen;
    std::map<std::string, std::string> asg;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == b.atoms.size()) {
            std::vector<std::string> vals;
            for (const auto& v : b.vars) vals.push_back(asg.at(v));
            if (seen.insert(vals).second) fa.tuples.push_back({vals, -1, false});
            return;
        }
        const auto& args = q.atom(b.atoms[k]).args;
        for (const auto& t : sources[b.atoms[k]]) {
            auto saved = asg;
            if (bind(args, t.vals, asg)) rec(k + 1);
            asg = std::move(saved);
        }
    };
    rec(0);
    return fa;
}

std::vector<std::vector<FlowTuple>> sources_from(const Database& d, const Query& q,
                                                 const std::vector<Fact>& facts) {
    std::vector<std::vector<FlowTuple>> src;
    for (const auto& a : q.atoms()) {
        std::vector<FlowTuple> ts;
        bool endo = !q.is_exogenous(a.relation);
        for (const auto& t : d.tuples(a.relation))
            ts.push_back({t, fact_index(facts, {a.relation, t}), endo});
        src.push_back(std::move(ts));
    }
    return src;
}

ResilienceResult from_cut(const CutOutcome& c, const std::vector<Fact>& facts,
                          const std::string& method) {
    ResilienceResult r;
    r.method = method;
    if (!c.feasible) {
        r.status = ResilienceResult::Status::Infeasible;
        r.notes.push_back("no contingency set exists: some witness is all exogenous");
        return r;
    }
    r.cut_value = c.value;
    r.cut_had_duplicates = c.duplicates;
    for (int f : c.facts) r.gamma.push_back(facts.at(f));
    r.gamma = sorted_unique(r.gamma);
    r.k = static_cast<int>(r.gamma.size());
    return r;
}

// Flow over a self-join-free view of q: `view` has one atom per atom of q
// (possibly renamed apart), and `sources` gives each atom's tuples.
ResilienceResult flow_on_view(const Query& view, const std::vector<std::vector<FlowTuple>>& sources,
                              const std::vector<Fact>& facts, const std::string& method,
                              const std::vector<std::size_t>& order = {}) {
    std::vector<Block> blocks;
    if (!order.empty()) {
        for (auto i : order) blocks.push_back({{i}, view.atom(i).args});
    } else {
        auto lin = linearize(view);
        if (!lin) throw PreconditionError(method + ": no linear arrangement of the atoms exists");
        blocks = *lin;
    }
    std::vector<FlowAtom> atoms;
    for (const auto& b : blocks) atoms.push_back(materialize(view, b, sources));
    auto res = from_cut(linear_cut(atoms), facts, method);
    bool merged = std::any_of(blocks.begin(), blocks.end(), [](const Block& b) { return b.atoms.size() > 1; });
    if (merged) res.notes.push_back("exogenous atoms merged into a join to obtain a linear order");
    return res;
}

// Renames every atom of the repeated relations apart: R -> R#0, R#1, ...
Query rename_apart(const Query& q, const std::set<std::string>& rels) {
    std::vector<Atom> atoms;
    std::set<std::string> exo = q.exogenous_relations();
    std::map<std::string, int> seen;
    for (const auto& a : q.atoms()) {
        Atom b = a;
        if (rels.count(a.relation)) {
            b.relation = a.relation + "#" + std::to_string(seen[a.relation]++);
            if (q.is_exogenous(a.relation)) exo.insert(b.relation);
        }
        atoms.push_back(std::move(b));
    }
    return Query(std::move(atoms), exo);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw PreconditionError(msg);
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
};

// Runs a shape solver on q by renaming d's relations into the shape's names.
template <class F>
ResilienceResult via_shape(const Database& d, const Query& q, const Query& shape,
                           const std::string& name, F&& solver) {
    auto iso = match_query(shape, q);
    require(iso.has_value(), name + ": query is not isomorphic to " + serialize_query(shape));
    std::map<std::string, std::string> to_shape, back;
    for (const auto& [pr, qr] : iso->rels) {
        to_shape[qr] = pr;
        back[pr] = qr;
    }
    auto r = solver(d.renamed_relations(to_shape, true));
    for (auto& f : r.gamma) f.relation = back.at(f.relation);
    r.gamma = sorted_unique(r.gamma);
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------

bool valid_contingency(const Database& d, const Query& q, const std::vector<Fact>& gamma) {
    for (const auto& f : gamma)
        if (q.is_exogenous(f.relation) || !q.has_relation(f.relation) || !d.contains(f)) return false;
    return !satisfies(d.without(gamma), q);
}

ResilienceResult resilience_exact(const Database& d, const Query& q) {
    Timer tm;
    ResilienceResult r;
    r.method = "exact";
    auto ws = enumerate_witnesses(d, q);
    r.witness_count = ws.witnesses.size();
    std::vector<int> elem(ws.facts.size(), -1);
    std::vector<std::size_t> back;
    for (std::size_t i = 0; i < ws.facts.size(); ++i)
        if (ws.endogenous[i]) {
            elem[i] = static_cast<int>(back.size());
            back.push_back(i);
        }
    SetFamily sets;
    for (const auto& w : ws.witnesses) {
        std::vector<int> s;
        for (auto f : w.support)
            if (elem[f] >= 0) s.push_back(elem[f]);
        if (s.empty()) {
            r.status = ResilienceResult::Status::Infeasible;
            r.notes.push_back("no contingency set exists: some witness is all exogenous");
            r.millis = tm.ms();
            return r;
        }
        sets.push_back(std::move(s));
    }
    auto sol = min_hitting_set(back.size(), sets);
    for (int e : *sol) r.gamma.push_back(ws.facts[back[e]]);
    r.k = static_cast<int>(r.gamma.size());
    r.millis = tm.ms();
    return r;
}

ResilienceResult resilience_flow_linear(const Database& d, const Query& q,
                                        const std::vector<std::size_t>& order) {
    Timer tm;
    for (const auto& rel : q.repeated_relations())
        require(q.is_exogenous(rel), "flow-linear: query has an endogenous self-join on " + rel);
    std::vector<std::size_t> ord = order;
    if (ord.empty()) {
        auto lo = linear_order(q);
        require(lo.has_value(), "flow-linear: query is not linear");
        ord = *lo;
    } else {
        require(ord.size() == q.size(), "flow-linear: order must list every atom once");
        std::vector<std::set<std::string>> vs;
        std::map<std::string, int> state;
        for (auto i : ord) {
            require(i < q.size(), "flow-linear: atom index out of range");
            for (auto& [v, s] : state)
                if (s == 1 && !q.atom_vars(i).count(v)) s = 2;
            for (const auto& v : q.atom_vars(i)) {
                require(state[v] != 2, "flow-linear: order is not linear for variable " + v);
                state[v] = 1;
            }
        }
    }
    auto facts = query_facts(d, q);
    auto r = flow_on_view(rename_apart(q, std::set<std::string>()), sources_from(d, q, facts), facts,
                          "flow-linear", ord);
    r.millis = tm.ms();
    return r;
}

ResilienceResult resilience_standard_flow(const Database& d, const Query& q) {
    Timer tm;
    for (const auto& rel : q.repeated_relations())
        require(q.is_exogenous(rel), "standard-flow: query has an endogenous self-join on " + rel);
    auto facts = query_facts(d, q);
    auto view = rename_apart(q, {});
    auto r = flow_on_view(view, sources_from(d, q, facts), facts, "standard-flow");
    r.millis = tm.ms();
    return r;
}

ResilienceResult resilience_2conf(const Database& d, const Query& q) {
    Timer tm;
    auto rep = q.repeated_relations();
    require(rep.size() == 1 && q.occurrences(rep[0]) == 2 && !q.is_exogenous(rep[0]),
            "conf-flow: query needs exactly one endogenous relation occurring twice");
    bool conf = false;
    try {
        conf = detect_2R_pattern(q).kind == FindingKind::CONFLUENCE;
    } catch (const QueryError&) {
    }
    require(conf, "conf-flow: the two atoms do not form a confluence");
    require(!has_confluence_exogenous_path(q), "conf-flow: confluence has an exogenous path");
    auto facts = query_facts(d, q);
    auto view = rename_apart(q, {rep[0]});
    auto r = flow_on_view(view, sources_from(d, q, facts), facts, "conf-flow");
    r.millis = tm.ms();
    return r;
}

ResilienceResult resilience_conf_ac_bipartite(const Database& d, const Query& q) {
    Timer tm;
    auto r = via_shape(d, q, shapes::q_conf_AC(), "conf-ac-bipartite", [](const Database& D) {
        // R never needs to be cut: A(a) or C(c) kills every witness R reaches.
        Query qx = shapes::q_conf_AC().with_exogenous({"R"});
        auto facts = query_facts(D, qx);
        return flow_on_view(rename_apart(qx, {"R"}), sources_from(D, qx, facts), facts,
                            "conf-ac-bipartite");
    });
    r.millis = tm.ms();
    return r;
}

namespace {

// König: minimum vertex cover of a bipartite graph from a maximum matching.
std::pair<std::vector<int>, std::vector<int>> koenig_cover(int nl, int nr,
                                                           const std::vector<std::vector<int>>& adj) {
    std::vector<int> ml(nl, -1), mr(nr, -1);
    for (int u = 0; u < nl; ++u) {
        std::vector<char> vis(nr, 0);
        std::function<bool(int)> aug = [&](int x) {
            for (int y : adj[x]) {
                if (vis[y]) continue;
                vis[y] = 1;
                if (mr[y] < 0 || aug(mr[y])) {
                    ml[x] = y;
                    mr[y] = x;
                    return true;
                }
            }
            return false;
        };
        aug(u);
    }
    std::vector<char> zl(nl, 0), zr(nr, 0);
    std::vector<int> st;
    for (int u = 0; u < nl; ++u)
        if (ml[u] < 0) {
            zl[u] = 1;
            st.push_back(u);
        }
    while (!st.empty()) {
        int u = st.back();
        st.pop_back();
        for (int y : adj[u])
            if (!zr[y] && ml[u] != y) {
                zr[y] = 1;
                if (mr[y] >= 0 && !zl[mr[y]]) {
                    zl[mr[y]] = 1;
                    st.push_back(mr[y]);
                }
            }
    }
    std::vector<int> cl, cr;
    for (int u = 0; u < nl; ++u)
        if (!zl[u]) cl.push_back(u);
    for (int y = 0; y < nr; ++y)
        if (zr[y]) cr.push_back(y);
    return {cl, cr};
}

// Pairs {R(a,b), R(b,a)} and loops R(a,a), keyed by the smaller tuple.
std::map<std::vector<std::string>, std::vector<std::string>> two_way_pairs(const Database& D) {
    std::map<std::vector<std::string>, std::vector<std::string>> pairs;
    const auto& R = D.tuples("R");
    for (const auto& t : R) {
        std::vector<std::string> inv{t[1], t[0]};
        if (!R.count(inv)) continue;
        const auto& lo = TupleLess{}(inv, t) ? inv : t;
        pairs[lo] = {lo[0], lo[1]};
    }
    return pairs;
}

ResilienceResult perm_count(const Database& D) {
    ResilienceResult r;
    r.method = "perm-count";
    // Each witness support is a 2-way pair or a loop; they are disjoint.
    for (const auto& [lo, p] : two_way_pairs(D)) r.gamma.push_back({"R", lo});
    r.gamma = sorted_unique(r.gamma);
    r.k = static_cast<int>(r.gamma.size());
    return r;
}

ResilienceResult perm_bipartite(const Database& D) {
    ResilienceResult r;
    r.method = "bipartite-vc";
    std::vector<std::string> as;
    for (const auto& t : D.tuples("A")) as.push_back(t[0]);
    std::map<std::string, int> aidx;
    for (std::size_t i = 0; i < as.size(); ++i) aidx[as[i]] = static_cast<int>(i);
    std::vector<std::vector<std::string>> pairs;
    for (const auto& [lo, p] : two_way_pairs(D)) pairs.push_back(lo);
    std::vector<std::vector<int>> adj(as.size());
    for (std::size_t j = 0; j < pairs.size(); ++j)
        for (const auto& c : {pairs[j][0], pairs[j][1]}) {
            auto it = aidx.find(c);
            if (it != aidx.end() &&
                std::find(adj[it->second].begin(), adj[it->second].end(), j) == adj[it->second].end())
                adj[it->second].push_back(static_cast<int>(j));
        }
    auto [cl, cr] = koenig_cover(static_cast<int>(as.size()), static_cast<int>(pairs.size()), adj);
    for (int u : cl) r.gamma.push_back({"A", {as[u]}});
    // Either tuple of a pair kills both witnesses through it.
    for (int y : cr) r.gamma.push_back({"R", pairs[y]});
    r.gamma = sorted_unique(r.gamma);
    r.k = static_cast<int>(r.gamma.size());
    return r;
}

}  // namespace

ResilienceResult resilience_perm_unbounded(const Database& d, const Query& q) {
    Timer tm;
    ResilienceResult r;
    if (match_query(shapes::q_perm(), q)) {
        r = via_shape(d, q, shapes::q_perm(), "perm-count", perm_count);
    } else if (match_query(shapes::q_perm_A(), q)) {
        r = via_shape(d, q, shapes::q_perm_A(), "bipartite-vc", perm_bipartite);
    } else {
        throw PreconditionError("perm: query is neither q_perm nor q_perm^A");
    }
    r.millis = tm.ms();
    return r;
}

ResilienceResult resilience_rep_z3(const Database& d, const Query& q) {
    Timer tm;
    auto rep = q.repeated_relations();
    require(rep.size() == 1 && q.occurrences(rep[0]) == 2 && !q.is_exogenous(rep[0]),
            "rep-z3-flow: query needs exactly one endogenous relation occurring twice");
    const std::string R = rep[0];
    require(q.relation(R).arity == 2, "rep-z3-flow: repeated relation must be binary");
    std::size_t loop = q.size(), other = q.size();
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q.atom(i).relation != R) continue;
        const auto& a = q.atom(i).args;
        if (a[0] == a[1])
            loop = loop == q.size() ? i : q.size() + 1;
        else
            other = i;
    }
    require(loop < q.size() && other < q.size(),
            "rep-z3-flow: needs one atom R(x,x) and one atom R(x,y)");
    const auto& x = q.atom(loop).args[0];
    const auto& oa = q.atom(other).args;
    require(oa[0] == x || oa[1] == x, "rep-z3-flow: the R atoms must share their variable");
    auto pl = is_pseudo_linear(q);
    require(pl.pseudo_linear, "rep-z3-flow: query is not pseudo-linear");

    // R(a,b) with a != b is never needed: view R(x,x) as a unary relation over
    // loops and the other R atom as an exogenous copy.
    auto facts = query_facts(d, q);
    std::vector<Atom> atoms;
    std::set<std::string> exo = q.exogenous_relations();
    std::vector<std::vector<FlowTuple>> src;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto& a = q.atom(i);
        std::vector<FlowTuple> ts;
        if (i == loop) {
            atoms.push_back({R + "#loop", {x}});
            for (const auto& t : d.tuples(R))
                if (t[0] == t[1]) ts.push_back({{t[0]}, fact_index(facts, {R, t}), true});
        } else if (i == other) {
            atoms.push_back({R + "#x", a.args});
            exo.insert(R + "#x");
            for (const auto& t : d.tuples(R)) ts.push_back({t, -1, false});
        } else {
            atoms.push_back(a);
            bool endo = !q.is_exogenous(a.relation);
            for (const auto& t : d.tuples(a.relation))
                ts.push_back({t, fact_index(facts, {a.relation, t}), endo});
        }
        src.push_back(std::move(ts));
    }
    auto r = flow_on_view(Query(atoms, exo), src, facts, "rep-z3-flow");
    r.millis = tm.ms();
    return r;
}

namespace {

bool has_A(const Database& D, const std::string& rel, const std::string& c) {
    return D.contains({rel, {c}});
}

ResilienceResult three_perm_A(const Database& D) {
    ResilienceResult r;
    r.method = "3perm-A";
    const auto& R = D.tuples("R");
    auto pairs = two_way_pairs(D);
    std::vector<std::vector<std::string>> plist;
    for (const auto& [lo, p] : pairs) plist.push_back(lo);
    // Constants reached from a by a 1-way tuple R(a,u).
    std::map<std::string, std::set<std::string>> one_way;
    for (const auto& t : R)
        if (t[0] != t[1] && !R.count({t[1], t[0]})) one_way[t[0]].insert(t[1]);

    FlowNetwork net(2, 0, 1);
    std::vector<int> pnode;
    std::vector<int> pair_edge;
    for (std::size_t j = 0; j < plist.size(); ++j) {
        int l = net.add_node(), rr = net.add_node();
        pnode.push_back(l);
        pair_edge.push_back(net.add_edge(l, rr, 1, static_cast<int>(j)));
        net.add_edge(rr, net.sink(), FlowNetwork::kUnbounded);
    }
    std::vector<std::string> as;
    std::vector<int> a_edge;
    for (const auto& t : D.tuples("A")) {
        const auto& a = t[0];
        as.push_back(a);
        int ar = net.add_node();
        a_edge.push_back(net.add_edge(net.source(), ar, 1, -2 - static_cast<int>(as.size() - 1)));
        for (std::size_t j = 0; j < plist.size(); ++j) {
            const auto& p = plist[j];
            bool link = p[0] == a || p[1] == a;
            auto it = one_way.find(a);
            if (!link && it != one_way.end()) link = it->second.count(p[0]) || it->second.count(p[1]);
            if (link) net.add_edge(ar, pnode[j], FlowNetwork::kUnbounded);
        }
    }
    auto cut = net.min_cut();
    r.cut_value = cut->value;
    std::set<std::string> cut_a;
    std::vector<std::size_t> cut_p;
    for (int e : cut->edges) {
        int tag = net.edges()[e].tag;
        if (tag <= -2)
            cut_a.insert(as[-2 - tag]);
        else
            cut_p.push_back(static_cast<std::size_t>(tag));
    }
    auto survives = [&](const std::string& c) { return has_A(D, "A", c) && !cut_a.count(c); };
    for (const auto& a : cut_a) r.gamma.push_back({"A", {a}});
    for (auto j : cut_p) {
        const auto& p = plist[j];
        if (p[0] == p[1]) {
            r.gamma.push_back({"R", p});
        } else if (survives(p[0]) && !survives(p[1])) {
            r.gamma.push_back({"R", {p[0], p[1]}});
        } else if (survives(p[1]) && !survives(p[0])) {
            r.gamma.push_back({"R", {p[1], p[0]}});
        } else {
            r.gamma.push_back({"R", p});
        }
    }
    r.gamma = sorted_unique(r.gamma);
    r.k = static_cast<int>(r.gamma.size());
    return r;
}

ResilienceResult three_perm_Swx(const Database& D) {
    ResilienceResult r;
    r.method = "3perm-Swx";
    const auto& R = D.tuples("R");
    auto pairs = two_way_pairs(D);
    std::vector<std::vector<std::string>> plist;
    for (const auto& [lo, p] : pairs) plist.push_back(lo);
    std::vector<std::vector<std::string>> one_way;
    for (const auto& t : R)
        if (t[0] != t[1] && !R.count({t[1], t[0]})) one_way.push_back(t);

    // Tags: >=0 pair index; <= -2 S tuple; >= 1000000 one-way tuple.
    constexpr int kOneWay = 1000000;
    FlowNetwork net(2, 0, 1);
    std::vector<int> pnode;
    for (std::size_t j = 0; j < plist.size(); ++j) {
        int l = net.add_node(), rr = net.add_node();
        pnode.push_back(l);
        net.add_edge(l, rr, 1, static_cast<int>(j));
        net.add_edge(rr, net.sink(), FlowNetwork::kUnbounded);
    }
    // X[a]: reached constant a via an S tuple; Y[b]: reached b via a 1-way R tuple.
    std::map<std::string, int> X, Y;
    auto node_of = [&](std::map<std::string, int>& M, const std::string& c, bool into_pairs) {
        auto [it, fresh] = M.try_emplace(c, -1);
        if (fresh) {
            it->second = net.add_node();
            if (into_pairs)
                for (std::size_t j = 0; j < plist.size(); ++j)
                    if (plist[j][0] == c || plist[j][1] == c)
                        net.add_edge(it->second, pnode[j], FlowNetwork::kUnbounded);
        }
        return it->second;
    };
    std::vector<std::vector<std::string>> ss;
    for (const auto& t : D.tuples("S")) {
        ss.push_back(t);
        net.add_edge(net.source(), node_of(X, t[1], true), 1, -2 - static_cast<int>(ss.size() - 1));
    }
    for (std::size_t k = 0; k < one_way.size(); ++k) {
        const auto& t = one_way[k];
        if (!X.count(t[0])) continue;
        net.add_edge(X[t[0]], node_of(Y, t[1], true), 1, kOneWay + static_cast<int>(k));
    }
    auto cut = net.min_cut();
    r.cut_value = cut->value;
    std::set<std::vector<std::string>> cut_s;
    for (int e : cut->edges) {
        int tag = net.edges()[e].tag;
        if (tag <= -2) {
            cut_s.insert(ss[-2 - tag]);
            r.gamma.push_back({"S", ss[-2 - tag]});
        } else if (tag >= kOneWay) {
            r.gamma.push_back({"R", one_way[tag - kOneWay]});
        }
    }
    auto s_survives_into = [&](const std::string& c) {
        for (const auto& t : ss)
            if (t[1] == c && !cut_s.count(t)) return true;
        return false;
    };
    for (int e : cut->edges) {
        int tag = net.edges()[e].tag;
        if (tag < 0 || tag >= kOneWay) continue;
        const auto& p = plist[tag];
        if (p[0] == p[1]) {
            r.gamma.push_back({"R", p});
        } else if (s_survives_into(p[0]) && !s_survives_into(p[1])) {
            r.gamma.push_back({"R", {p[0], p[1]}});
        } else if (s_survives_into(p[1]) && !s_survives_into(p[0])) {
            r.gamma.push_back({"R", {p[1], p[0]}});
        } else {
            r.gamma.push_back({"R", p});
        }
    }
    r.gamma = sorted_unique(r.gamma);
    r.k = static_cast<int>(r.gamma.size());
    return r;
}

ResilienceResult three_conf_TS(const Database& D) {
    const Query& q = shapes::q_3conf_TS();
    std::vector<Fact> forced;
    for (const auto& t : D.tuples("R"))
        if (D.contains({"T", t}) && D.contains({"S", t})) forced.push_back({"R", t});
    Database rest = D.without(forced);
    auto facts = query_facts(rest, q);
    auto r = flow_on_view(rename_apart(q, {"R"}), sources_from(rest, q, facts), facts, "3conf-TS");
    if (!r.feasible()) return r;
    r.gamma.insert(r.gamma.end(), forced.begin(), forced.end());
    r.gamma = sorted_unique(r.gamma);
    r.k = static_cast<int>(r.gamma.size());
    if (!forced.empty())
        r.notes.push_back(std::to_string(forced.size()) + " tuple(s) forced by T/S overlap");
    return r;
}

}  // namespace

ResilienceResult resilience_3perm_A(const Database& d, const Query& q) {
    Timer tm;
    auto r = via_shape(d, q, shapes::q_3perm_A(), "3perm-A", three_perm_A);
    r.millis = tm.ms();
    return r;
}
ResilienceResult resilience_3perm_A(const Database& d) { return resilience_3perm_A(d, shapes::q_3perm_A()); }

ResilienceResult resilience_3perm_Swx(const Database& d, const Query& q) {
    Timer tm;
    auto r = via_shape(d, q, shapes::q_3perm_Swx(), "3perm-Swx", three_perm_Swx);
    r.millis = tm.ms();
    return r;
}
ResilienceResult resilience_3perm_Swx(const Database& d) {
    return resilience_3perm_Swx(d, shapes::q_3perm_Swx());
}

ResilienceResult resilience_3conf_TS(const Database& d, const Query& q) {
    Timer tm;
    auto r = via_shape(d, q, shapes::q_3conf_TS(), "3conf-TS", three_conf_TS);
    r.millis = tm.ms();
    return r;
}
ResilienceResult resilience_3conf_TS(const Database& d) { return resilience_3conf_TS(d, shapes::q_3conf_TS()); }

std::vector<std::string> method_names() {
    return {"exact",        "flow-linear", "standard-flow", "conf-flow", "conf-ac-bipartite",
            "perm-count",   "bipartite-vc", "rep-z3-flow",  "3perm-A",   "3perm-Swx",
            "3conf-TS", "per-component"};
}

ResilienceResult run_method(const std::string& method, const Database& d, const Query& q) {
    check_arities(d, q);
    if (method == "exact") return resilience_exact(d, q);
    if (method == "flow-linear") return resilience_flow_linear(d, q);
    if (method == "standard-flow") return resilience_standard_flow(d, q);
    if (method == "conf-flow") return resilience_2conf(d, q);
    if (method == "conf-ac-bipartite") return resilience_conf_ac_bipartite(d, q);
    if (method == "perm-count") {
        require(match_query(shapes::q_perm(), q).has_value(), "perm-count: query is not q_perm");
        return resilience_perm_unbounded(d, q);
    }
    if (method == "bipartite-vc") {
        require(match_query(shapes::q_perm_A(), q).has_value(), "bipartite-vc: query is not q_perm^A");
        return resilience_perm_unbounded(d, q);
    }
    if (method == "rep-z3-flow") return resilience_rep_z3(d, q);
    if (method == "3perm-A") return resilience_3perm_A(d, q);
    if (method == "3perm-Swx") return resilience_3perm_Swx(d, q);
    if (method == "3conf-TS") return resilience_3conf_TS(d, q);
    if (method == "per-component") return solve(d, q);
    throw PreconditionError("unknown method " + method);
}

namespace {

ResilienceResult solve_connected(const Database& d, const Classification& c) {
    const Query& q = c.normalized_query;
    if (c.verdict == Verdict::PTIME && !c.solver_plan.empty()) {
        try {
            auto r = run_method(c.solver_plan, d, q);
            r.notes.insert(r.notes.begin(), "solved by the classifier's plan");
            return r;
        } catch (const PreconditionError& e) {
            auto r = resilience_exact(d, q);
            r.notes.push_back(std::string("plan unavailable, used exact: ") + e.what());
            return r;
        }
    }
    auto r = resilience_exact(d, q);
    switch (c.verdict) {
        case Verdict::NP_COMPLETE: r.notes.push_back("warning: NP-complete query"); break;
        case Verdict::OPEN: r.notes.push_back("note: complexity OPEN"); break;
        case Verdict::UNSUPPORTED: r.notes.push_back("note: query outside the supported fragment"); break;
        case Verdict::PTIME: r.notes.push_back("PTIME query without a dedicated solver"); break;
    }
    return r;
}

}  // namespace

ResilienceResult solve(const Database& d, const Query& q) {
    Timer tm;
    check_arities(d, q);
    auto cls = classify(q);
    ResilienceResult best;
    bool have = false;
    std::vector<std::string> methods;
    const auto& parts = cls.components.empty() ? std::vector<Classification>{cls} : cls.components;
    for (const auto& part : parts) {
        auto r = solve_connected(d, part);
        methods.push_back(r.method);
        // A Boolean conjunction is false as soon as one component is false.
        if (!have || (r.feasible() && (!best.feasible() || r.k < best.k))) {
            best = r;
            have = true;
        }
    }
    if (parts.size() > 1) {
        std::string all;
        for (const auto& m : methods) all += (all.empty() ? "" : ",") + m;
        best.notes.push_back("disconnected query: minimum over components (" + all + ")");
    }
    best.witness_count = enumerate_witnesses(d, q).witnesses.size();
    if (best.witness_count == 0) {
        best.k = 0;
        best.gamma.clear();
        best.status = ResilienceResult::Status::Ok;
    }
    best.verdict = to_string(cls.verdict);
    best.millis = tm.ms();
    return best;
}

}  // namespace resil
