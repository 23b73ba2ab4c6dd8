#include "resil/analysis.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace resil {

namespace {

bool extend(const Atom& a, const Atom& b, Homomorphism& h, std::vector<std::string>& added) {
    for (std::size_t k = 0; k < a.args.size(); ++k) {
        auto it = h.find(a.args[k]);
        if (it == h.end()) {
            h[a.args[k]] = b.args[k];
            added.push_back(a.args[k]);
        } else if (it->second != b.args[k]) {
            return false;
        }
    }
    return true;
}

bool hom_rec(const Query& src, const Query& dst, std::size_t i, Homomorphism& h) {
    if (i == src.size()) return true;
    const auto& a = src.atom(i);
    for (const auto& b : dst.atoms()) {
        if (b.relation != a.relation || b.args.size() != a.args.size()) continue;
        std::vector<std::string> added;
        if (extend(a, b, h, added) && hom_rec(src, dst, i + 1, h)) return true;
        for (const auto& v : added) h.erase(v);
    }
    return false;
}

}  // namespace

std::optional<Homomorphism> find_homomorphism(const Query& src, const Query& dst) {
    for (const auto& [name, decl] : src.relations()) {
        if (!dst.has_relation(name)) return std::nullopt;
        if (dst.relation(name).arity != decl.arity) return std::nullopt;
    }
    Homomorphism h;
    if (hom_rec(src, dst, 0, h)) return h;
    return std::nullopt;
}

bool homomorphically_equivalent(const Query& a, const Query& b) {
    return find_homomorphism(a, b) && find_homomorphism(b, a);
}

Query minimize(const Query& q) {
    Query cur = q;
    bool changed = true;
    while (changed && cur.size() > 1) {
        changed = false;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            std::vector<std::size_t> keep;
            for (std::size_t j = 0; j < cur.size(); ++j)
                if (j != i) keep.push_back(j);
            Query sub = cur.subquery(keep);
            if (find_homomorphism(cur, sub)) {
                cur = sub;
                changed = true;
                break;
            }
        }
    }
    return cur;
}

std::vector<std::vector<std::size_t>> component_indices(const Query& q) {
    std::vector<std::size_t> parent(q.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::map<std::string, std::size_t> first;
    for (std::size_t i = 0; i < q.size(); ++i) {
        for (const auto& v : q.atom(i).args) {
            auto it = first.find(v);
            if (it == first.end())
                first[v] = i;
            else
                parent[find(i)] = find(it->second);
        }
    }
    std::vector<std::vector<std::size_t>> out;
    std::map<std::size_t, std::size_t> slot;
    for (std::size_t i = 0; i < q.size(); ++i) {
        auto r = find(i);
        auto it = slot.find(r);
        if (it == slot.end()) {
            slot[r] = out.size();
            out.push_back({i});
        } else {
            out[it->second].push_back(i);
        }
    }
    return out;
}

std::vector<Query> components(const Query& q) {
    std::vector<Query> out;
    for (const auto& idx : component_indices(q)) out.push_back(q.subquery(idx));
    return out;
}

namespace {

// Does A dominate B? Exhaustive over f : [arity A] -> [arity B].
bool dominates(const Query& q, const std::string& A, const std::string& B) {
    int ka = q.relation(A).arity, kb = q.relation(B).arity;
    std::vector<const Atom*> as, bs;
    for (const auto& a : q.atoms()) {
        if (a.relation == A) as.push_back(&a);
        if (a.relation == B) bs.push_back(&a);
    }
    std::vector<int> f(ka, 0);
    while (true) {
        bool all = true;
        for (const Atom* g : bs) {
            bool found = false;
            for (const Atom* h : as) {
                bool ok = true;
                for (int i = 0; i < ka && ok; ++i) ok = h->args[i] == g->args[f[i]];
                if (ok) { found = true; break; }
            }
            if (!found) { all = false; break; }
        }
        if (all) return true;
        int p = 0;
        while (p < ka && ++f[p] == kb) f[p++] = 0;
        if (p == ka) return false;
    }
}

}  // namespace

std::set<std::string> dominated_relations(const Query& q) {
    std::set<std::string> out;
    for (const auto& [b, db] : q.relations()) {
        if (db.exogenous) continue;
        for (const auto& [a, da] : q.relations()) {
            if (a == b || da.exogenous) continue;
            if (dominates(q, a, b)) { out.insert(b); break; }
        }
    }
    return out;
}

Query normalize(const Query& q) {
    Query cur = q;
    while (true) {
        auto d = dominated_relations(cur);
        if (d.empty()) return cur;
        // One at a time: two relations may dominate each other.
        cur = cur.with_exogenous({*d.begin()});
    }
}

bool connected_avoiding(const Query& q, std::size_t a, std::size_t b,
                        const std::set<std::string>& banned) {
    if (a == b) return true;
    std::vector<char> seen(q.size(), 0);
    std::vector<std::size_t> stack{a};
    seen[a] = 1;
    while (!stack.empty()) {
        auto i = stack.back();
        stack.pop_back();
        for (const auto& v : q.atom(i).args) {
            if (banned.count(v)) continue;
            for (std::size_t j = 0; j < q.size(); ++j) {
                if (seen[j]) continue;
                const auto& args = q.atom(j).args;
                if (std::find(args.begin(), args.end(), v) == args.end()) continue;
                if (j == b) return true;
                seen[j] = 1;
                stack.push_back(j);
            }
        }
    }
    return false;
}

std::vector<Triad> find_triads(const Query& q) {
    std::vector<std::size_t> endo;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (!q.atom_exogenous(i)) endo.push_back(i);
    std::vector<Triad> out;
    for (std::size_t x = 0; x < endo.size(); ++x)
        for (std::size_t y = x + 1; y < endo.size(); ++y)
            for (std::size_t z = y + 1; z < endo.size(); ++z) {
                auto a = endo[x], b = endo[y], c = endo[z];
                if (connected_avoiding(q, a, b, q.atom_vars(c)) &&
                    connected_avoiding(q, b, c, q.atom_vars(a)) &&
                    connected_avoiding(q, a, c, q.atom_vars(b)))
                    out.push_back({{a, b, c}});
            }
    return out;
}

namespace {

bool linear_rec(const std::vector<std::set<std::string>>& vs, std::vector<std::size_t>& order,
                std::vector<char>& used, std::map<std::string, int>& state) {
    if (order.size() == vs.size()) return true;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (used[i]) continue;
        bool ok = true;
        for (const auto& v : vs[i])
            if (state[v] == 2) { ok = false; break; }
        if (!ok) continue;
        auto saved = state;
        for (auto& [v, s] : state)
            if (s == 1 && !vs[i].count(v)) s = 2;
        for (const auto& v : vs[i]) state[v] = 1;
        used[i] = 1;
        order.push_back(i);
        if (linear_rec(vs, order, used, state)) return true;
        order.pop_back();
        used[i] = 0;
        state = saved;
    }
    return false;
}

std::optional<std::vector<std::size_t>> interval_order(const std::vector<std::set<std::string>>& vs) {
    std::vector<std::size_t> order;
    std::vector<char> used(vs.size(), 0);
    std::map<std::string, int> state;
    for (const auto& s : vs)
        for (const auto& v : s) state[v] = 0;
    if (linear_rec(vs, order, used, state)) return order;
    return std::nullopt;
}

}  // namespace

std::optional<std::vector<std::size_t>> linear_order(const Query& q) {
    std::vector<std::set<std::string>> vs;
    for (std::size_t i = 0; i < q.size(); ++i) vs.push_back(q.atom_vars(i));
    return interval_order(vs);
}

PseudoLinearity is_pseudo_linear(const Query& q) {
    if (minimize(q).size() != q.size()) throw QueryError("pseudo-linearity requires a minimal query");
    if (component_indices(q).size() != 1)
        throw QueryError("pseudo-linearity requires a connected query");
    PseudoLinearity res;
    std::vector<std::set<std::string>> keys;
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::set<std::string>> endo_vars;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q.atom_exogenous(i)) continue;
        auto vs = q.atom_vars(i);
        endo_vars.push_back(vs);
        auto it = std::find(keys.begin(), keys.end(), vs);
        if (it == keys.end()) {
            keys.push_back(vs);
            groups.push_back({i});
        } else {
            groups[it - keys.begin()].push_back(i);
        }
    }
    res.naive_interval = interval_order(endo_vars).has_value();
    const std::size_t n = groups.size();
    if (n <= 2) {
        res.pseudo_linear = true;
        res.groups = groups;
        return res;
    }
    // sep[k][i][j]: removing the variables of group k disconnects groups i and j.
    std::vector<std::vector<std::vector<char>>> sep(
        n, std::vector<std::vector<char>>(n, std::vector<char>(n, 0)));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || i == k || j == k) continue;
                bool conn = false;
                for (auto a : groups[i])
                    for (auto b : groups[j])
                        conn = conn || connected_avoiding(q, a, b, keys[k]);
                sep[k][i][j] = !conn;
            }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::vector<std::size_t> pos(n);
        for (std::size_t p = 0; p < n; ++p) pos[perm[p]] = p;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
            for (std::size_t j = 0; j < n && ok; ++j)
                for (std::size_t k = 0; k < n && ok; ++k) {
                    if (i == j || j == k || i == k) continue;
                    bool between = (pos[i] < pos[k] && pos[k] < pos[j]) ||
                                   (pos[j] < pos[k] && pos[k] < pos[i]);
                    if (between != static_cast<bool>(sep[k][i][j])) ok = false;
                }
        if (ok) {
            res.pseudo_linear = true;
            for (auto g : perm) res.groups.push_back(groups[g]);
            return res;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return res;
}

namespace {

std::string encode(const Query& q, const std::vector<std::size_t>& perm) {
    std::map<std::string, int> vm, rm;
    std::string out;
    for (auto i : perm) {
        const auto& a = q.atom(i);
        auto r = rm.try_emplace(a.relation, static_cast<int>(rm.size())).first->second;
        out += 'r' + std::to_string(r);
        if (q.is_exogenous(a.relation)) out += 'x';
        out += '(';
        for (std::size_t k = 0; k < a.args.size(); ++k) {
            if (k) out += ',';
            auto v = vm.try_emplace(a.args[k], static_cast<int>(vm.size())).first->second;
            out += std::to_string(v);
        }
        out += ')';
    }
    return out;
}

}  // namespace

std::string canonical_form(const Query& q) {
    std::vector<std::size_t> perm(q.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::string best;
    bool first = true;
    do {
        auto s = encode(q, perm);
        if (first || s < best) {
            best = s;
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

namespace {

bool iso_rec(const Query& p, const Query& q, std::size_t i, std::vector<char>& used,
             QueryIso& iso, std::map<std::string, std::string>& vinv,
             std::map<std::string, std::string>& rinv) {
    if (i == p.size()) return true;
    const auto& a = p.atom(i);
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (used[j]) continue;
        const auto& b = q.atom(j);
        if (a.args.size() != b.args.size()) continue;
        if (p.is_exogenous(a.relation) != q.is_exogenous(b.relation)) continue;
        auto rit = iso.rels.find(a.relation);
        if (rit != iso.rels.end() ? rit->second != b.relation : rinv.count(b.relation) > 0)
            continue;
        auto saved_v = iso.vars;
        auto saved_vi = vinv;
        bool ok = true;
        for (std::size_t k = 0; k < a.args.size() && ok; ++k) {
            auto it = iso.vars.find(a.args[k]);
            if (it != iso.vars.end()) {
                ok = it->second == b.args[k];
            } else if (vinv.count(b.args[k])) {
                ok = false;
            } else {
                iso.vars[a.args[k]] = b.args[k];
                vinv[b.args[k]] = a.args[k];
            }
        }
        if (ok) {
            bool new_rel = rit == iso.rels.end();
            if (new_rel) {
                iso.rels[a.relation] = b.relation;
                rinv[b.relation] = a.relation;
            }
            used[j] = 1;
            if (iso_rec(p, q, i + 1, used, iso, vinv, rinv)) return true;
            used[j] = 0;
            if (new_rel) {
                iso.rels.erase(a.relation);
                rinv.erase(b.relation);
            }
        }
        iso.vars = saved_v;
        vinv = saved_vi;
    }
    return false;
}

}  // namespace

std::optional<QueryIso> match_query(const Query& pattern, const Query& q) {
    if (pattern.size() != q.size() || pattern.variables().size() != q.variables().size() ||
        pattern.relations().size() != q.relations().size())
        return std::nullopt;
    QueryIso iso;
    std::vector<char> used(q.size(), 0);
    std::map<std::string, std::string> vinv, rinv;
    if (iso_rec(pattern, q, 0, used, iso, vinv, rinv)) return iso;
    return std::nullopt;
}

}  // namespace resil
