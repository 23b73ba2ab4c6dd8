#include "resil/ijp.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "resil/analysis.hpp"
#include "resil/solvers.hpp"

namespace resil {

namespace {

std::set<std::string> const_set(const std::vector<std::string>& t) { return {t.begin(), t.end()}; }

bool subset(const std::set<std::string>& a, const std::set<std::string>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// All strictly increasing index vectors of length k into [0, n).
void index_vectors(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = from; i < n; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

std::vector<std::string> pick(const std::vector<std::string>& t, const std::vector<std::size_t>& j) {
    std::vector<std::string> out;
    for (auto i : j) out.push_back(t[i]);
    return out;
}

struct Rho {
    int k;
    std::vector<Fact> gamma;
};

Rho rho_of(const Database& d, const Query& q) {
    auto r = resilience_exact(d, q);
    if (!r.feasible()) return {-1, {}};
    return {r.k, r.gamma};
}

// Fast rejection used by the search: cheap conditions first, full report only on success.
IJPReport evaluate(const IJPCandidate& cand, bool full) {
    IJPReport rep;
    const Query& q = cand.query;
    const Fact fa{cand.relation, cand.tuple_a}, fb{cand.relation, cand.tuple_b};
    const auto sa = const_set(cand.tuple_a), sb = const_set(cand.tuple_b);

    rep.c1.ok = cand.tuple_a != cand.tuple_b && cand.database.contains(fa) && cand.database.contains(fb) &&
                !subset(sa, sb) && !subset(sb, sa);
    rep.c1.evidence = fa.str() + " vs " + fb.str() + (rep.c1.ok ? ": constant sets incomparable"
                                                                : ": constant sets comparable or tuples missing");
    if (!rep.c1.ok && !full) return rep;

    rep.closed = closure_condition4(cand);
    for (const auto& f : rep.closed.facts())
        if (!cand.database.contains(f)) rep.closure_added.push_back(f);
    rep.c4.ok = rep.closure_added.empty();
    if (rep.c4.ok) {
        rep.c4.evidence = "closure adds nothing";
    } else {
        rep.c4.evidence = "closure adds";
        for (const auto& f : rep.closure_added) rep.c4.evidence += " " + f.str();
        if (!full) return rep;
    }
    const Database& D = rep.closed;

    rep.c3.ok = true;
    for (const auto& [rel, ts] : D.relations()) {
        if (!q.has_relation(rel) || q.is_exogenous(rel)) continue;
        for (const auto& t : ts) {
            auto s = const_set(t);
            bool strict_a = s != sa && subset(s, sa), strict_b = s != sb && subset(s, sb);
            if (strict_a || strict_b) {
                rep.c3.ok = false;
                rep.c3.evidence = Fact{rel, t}.str() + " uses a strict subset of the constants of " +
                                  (strict_a ? fa.str() : fb.str());
                break;
            }
        }
        if (!rep.c3.ok) break;
    }
    if (rep.c3.ok) rep.c3.evidence = "no endogenous tuple on a strict subset of the constants";
    if (!rep.c3.ok && !full) return rep;

    auto ws = enumerate_witnesses(D, q);
    auto ia = ws.index_of(fa), ib = ws.index_of(fb);
    const std::size_t m = q.size();
    std::size_t size_a = 0, size_b = 0;
    for (const auto& w : ws.witnesses) {
        bool has_a = std::binary_search(w.support.begin(), w.support.end(), ia);
        bool has_b = std::binary_search(w.support.begin(), w.support.end(), ib);
        if (has_a) {
            ++rep.witnesses_with_a;
            size_a = w.support.size();
        }
        if (has_b) {
            ++rep.witnesses_with_b;
            size_b = w.support.size();
        }
    }
    rep.c2.ok = rep.witnesses_with_a == 1 && rep.witnesses_with_b == 1 && size_a == m && size_b == m;
    rep.c2.evidence = fa.str() + " in " + std::to_string(rep.witnesses_with_a) + " witness(es)";
    if (rep.witnesses_with_a == 1) rep.c2.evidence += " of " + std::to_string(size_a) + " tuples";
    rep.c2.evidence += ", " + fb.str() + " in " + std::to_string(rep.witnesses_with_b) + " witness(es)";
    if (rep.witnesses_with_b == 1) rep.c2.evidence += " of " + std::to_string(size_b) + " tuples";
    rep.c2.evidence += "; m = " + std::to_string(m);
    if (!rep.c2.ok && !full) return rep;

    auto r0 = rho_of(D, q);
    auto r1 = rho_of(D.without({fa}), q);
    auto r2 = rho_of(D.without({fb}), q);
    auto r3 = rho_of(D.without({fa, fb}), q);
    rep.rho = r0.k;
    rep.rho_minus_a = r1.k;
    rep.rho_minus_b = r2.k;
    rep.rho_minus_ab = r3.k;
    rep.gamma = r0.gamma;
    rep.gamma_minus_a = r1.gamma;
    rep.gamma_minus_b = r2.gamma;
    rep.gamma_minus_ab = r3.gamma;
    const int c = r0.k;
    rep.c5.ok = c >= 1 && r1.k == c - 1 && r2.k == c - 1 && r3.k == c - 1;
    rep.c5.evidence = "rho " + std::to_string(r0.k) + ", -a " + std::to_string(r1.k) + ", -b " +
                      std::to_string(r2.k) + ", -both " + std::to_string(r3.k);
    return rep;
}

// Backtracking constant bijection from a onto b; `pinned` facts of a must map
// onto the listed facts of b (one alternative per entry).
bool iso_search(const Database& a, const Database& b,
                const std::vector<std::pair<std::vector<Fact>, std::vector<Fact>>>& pinned) {
    if (a.size() != b.size()) return false;
    for (const auto& [rel, ts] : a.relations())
        if (b.tuples(rel).size() != ts.size()) return false;
    if (a.constants().size() != b.constants().size()) return false;

    for (const auto& [from, to] : pinned) {
        std::vector<Fact> order = from;
        for (const auto& f : a.facts())
            if (std::find(from.begin(), from.end(), f) == from.end()) order.push_back(f);
        std::map<std::string, std::string> fwd, bwd;
        std::set<Fact> used;
        std::function<bool(std::size_t)> rec = [&](std::size_t i) {
            if (i == order.size()) return true;
            const Fact& f = order[i];
            auto try_target = [&](const std::vector<std::string>& t) {
                Fact g{f.relation, t};
                if (used.count(g)) return false;
                std::vector<std::string> newly;
                bool ok = true;
                for (std::size_t k = 0; k < t.size() && ok; ++k) {
                    auto it = fwd.find(f.args[k]);
                    if (it != fwd.end()) {
                        ok = it->second == t[k];
                    } else if (bwd.count(t[k])) {
                        ok = false;
                    } else {
                        fwd[f.args[k]] = t[k];
                        bwd[t[k]] = f.args[k];
                        newly.push_back(f.args[k]);
                    }
                }
                if (ok) {
                    used.insert(g);
                    if (rec(i + 1)) return true;
                    used.erase(g);
                }
                for (const auto& c : newly) {
                    bwd.erase(fwd[c]);
                    fwd.erase(c);
                }
                return false;
            };
            if (i < to.size()) return try_target(to[i].args);
            for (const auto& t : b.tuples(f.relation))
                if (try_target(t)) return true;
            return false;
        };
        if (rec(0)) return true;
    }
    return false;
}

}  // namespace

Database closure_condition4(const IJPCandidate& cand) {
    Database d = cand.database;
    const Query& q = cand.query;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [rel, decl] : q.relations()) {
            if (!decl.exogenous) continue;
            std::vector<std::vector<std::size_t>> js;
            if (static_cast<std::size_t>(decl.arity) <= cand.tuple_a.size())
                index_vectors(cand.tuple_a.size(), decl.arity, js);
            std::vector<std::vector<std::string>> snapshot(d.tuples(rel).begin(), d.tuples(rel).end());
            for (const auto& t : snapshot)
                for (const auto& j : js) {
                    if (t == pick(cand.tuple_a, j) && d.add(rel, pick(cand.tuple_b, j))) changed = true;
                    if (t == pick(cand.tuple_b, j) && d.add(rel, pick(cand.tuple_a, j))) changed = true;
                }
        }
    }
    return d;
}

IJPReport check_ijp(const IJPCandidate& cand) { return evaluate(cand, true); }

std::uint64_t enumerate_partitions(int n, const std::function<bool(const std::vector<int>&)>& visit) {
    if (n < 0) return 0;
    if (n == 0) {
        visit({});
        return 1;
    }
    std::vector<int> a(n, 0), mx(n, 0);  // mx[i] = max of a[0..i-1]
    std::uint64_t count = 0;
    while (true) {
        ++count;
        if (!visit(a)) return count;
        int i = n - 1;
        while (i > 0 && a[i] > mx[i]) --i;
        if (i == 0) return count;
        ++a[i];
        for (int k = i + 1; k < n; ++k) {
            a[k] = 0;
            mx[k] = std::max(mx[k - 1], a[k - 1]);
        }
    }
}

std::uint64_t bell_number(int n) {
    // Bell triangle.
    std::vector<std::uint64_t> row{1};
    for (int i = 1; i <= n; ++i) {
        std::vector<std::uint64_t> next{row.back()};
        for (auto v : row) next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.front();
}

Database canonical_witnesses(const Query& q, int joins) {
    Database d;
    for (int j = 1; j <= joins; ++j)
        for (const auto& a : q.atoms()) {
            std::vector<std::string> t;
            for (const auto& v : a.args) t.push_back(v + std::to_string(j));
            d.add(a.relation, t);
        }
    return d;
}

bool databases_isomorphic(const Database& a, const Database& b) { return iso_search(a, b, {{{}, {}}}); }

bool candidates_isomorphic(const IJPCandidate& a, const IJPCandidate& b) {
    if (a.relation != b.relation) return false;
    const Fact a1{a.relation, a.tuple_a}, a2{a.relation, a.tuple_b};
    const Fact b1{b.relation, b.tuple_a}, b2{b.relation, b.tuple_b};
    return iso_search(a.database, b.database, {{{a1, a2}, {b1, b2}}, {{a1, a2}, {b2, b1}}});
}

IJPSearchResult ijp_search(const Query& q, const IJPSearchOptions& opt) {
    IJPSearchResult res;
    auto dominated = dominated_relations(q);
    std::uint64_t spent = 0;
    for (int j = 1; j <= opt.max_joins; ++j) {
        Database base = canonical_witnesses(q, j);
        std::vector<std::string> consts;
        for (int k = 1; k <= j; ++k)
            for (const auto& v : q.variables()) consts.push_back(v + std::to_string(k));
        std::map<std::string, int> cidx;
        for (std::size_t i = 0; i < consts.size(); ++i) cidx[consts[i]] = static_cast<int>(i);
        const auto facts = base.facts();
        std::uint64_t visited = 0;
        bool stopped = false;
        visited = enumerate_partitions(static_cast<int>(consts.size()), [&](const std::vector<int>& rgs) {
            if (spent >= opt.budget) {
                stopped = true;
                return false;
            }
            ++spent;
            Database d;
            for (const auto& f : facts) {
                std::vector<std::string> t;
                for (const auto& c : f.args) t.push_back(std::to_string(rgs[cidx[c]] + 1));
                d.add(f.relation, t);
            }
            for (const auto& [rel, decl] : q.relations()) {
                if (decl.exogenous || dominated.count(rel)) continue;
                std::vector<std::vector<std::string>> ts(d.tuples(rel).begin(), d.tuples(rel).end());
                for (std::size_t x = 0; x < ts.size(); ++x)
                    for (std::size_t y = x + 1; y < ts.size(); ++y) {
                        IJPCandidate cand{d, q, rel, ts[x], ts[y]};
                        ++res.candidates_checked;
                        cand.database = closure_condition4(cand);
                        auto rep = evaluate(cand, false);
                        if (!rep.pass()) continue;
                        bool dup = false;
                        for (const auto& f : res.found)
                            if (candidates_isomorphic(f.candidate, cand)) {
                                dup = true;
                                break;
                            }
                        if (dup) continue;
                        IJPFound found{cand, check_ijp(cand), j, {}};
                        int nb = 0;
                        for (int b : rgs) nb = std::max(nb, b + 1);
                        found.partition.assign(nb, {});
                        for (std::size_t i = 0; i < consts.size(); ++i) found.partition[rgs[i]].push_back(consts[i]);
                        res.found.push_back(std::move(found));
                    }
            }
            return true;
        });
        if (stopped) --visited;  // the last visit was refused
        res.partitions_per_join.push_back(visited);
        if (stopped) {
            res.complete = false;
            break;
        }
        if (opt.first_only && !res.found.empty()) break;
    }
    return res;
}

}  // namespace resil
