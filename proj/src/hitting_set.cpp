#include "resil/hitting_set.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace resil {

namespace {

using Sol = std::vector<int>;

bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Applies unit propagation, superset removal and element domination.
// Returns false if an empty set appears.
bool reduce(SetFamily& sets, Sol& forced) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& s : sets)
            if (s.empty()) return false;

        // Unit sets force their element.
        std::vector<int> units;
        for (const auto& s : sets)
            if (s.size() == 1) units.push_back(s[0]);
        if (!units.empty()) {
            std::sort(units.begin(), units.end());
            units.erase(std::unique(units.begin(), units.end()), units.end());
            forced.insert(forced.end(), units.begin(), units.end());
            SetFamily rest;
            for (auto& s : sets) {
                bool hit = false;
                for (int e : s)
                    if (std::binary_search(units.begin(), units.end(), e)) { hit = true; break; }
                if (!hit) rest.push_back(std::move(s));
            }
            sets = std::move(rest);
            changed = true;
            continue;
        }

        // Drop duplicates and supersets.
        std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        });
        sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
        SetFamily kept;
        for (auto& s : sets) {
            bool super = false;
            for (const auto& k : kept)
                if (k.size() < s.size() && is_subset(k, s)) { super = true; break; }
            if (!super) kept.push_back(std::move(s));
        }
        if (kept.size() != sets.size()) changed = true;
        sets = std::move(kept);

        // An element whose sets are covered by another element's sets is never needed.
        std::map<int, std::vector<int>> occ;
        for (std::size_t i = 0; i < sets.size(); ++i)
            for (int e : sets[i]) occ[e].push_back(static_cast<int>(i));
        std::vector<int> elems;
        for (const auto& [e, o] : occ) elems.push_back(e);
        std::vector<int> drop;
        for (int e : elems) {
            const auto& oe = occ[e];
            for (int f : elems) {
                if (f == e) continue;
                const auto& of = occ[f];
                if (of.size() < oe.size()) continue;
                if (of.size() == oe.size() && f > e) continue;
                if (!std::binary_search(drop.begin(), drop.end(), f) && is_subset(oe, of)) {
                    drop.push_back(e);
                    break;
                }
            }
            std::sort(drop.begin(), drop.end());
        }
        if (!drop.empty()) {
            for (auto& s : sets)
                s.erase(std::remove_if(s.begin(), s.end(),
                                       [&](int e) { return std::binary_search(drop.begin(), drop.end(), e); }),
                        s.end());
            changed = true;
        }
    }
    return true;
}

int packing_bound(const SetFamily& sets) {
    std::vector<std::size_t> order(sets.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return sets[a].size() < sets[b].size(); });
    std::vector<int> used;
    int lb = 0;
    for (auto i : order) {
        bool clash = false;
        for (int e : sets[i])
            if (std::binary_search(used.begin(), used.end(), e)) { clash = true; break; }
        if (clash) continue;
        ++lb;
        used.insert(used.end(), sets[i].begin(), sets[i].end());
        std::sort(used.begin(), used.end());
    }
    return lb;
}

Sol greedy(SetFamily sets) {
    Sol out;
    while (!sets.empty()) {
        std::map<int, int> deg;
        for (const auto& s : sets)
            for (int e : s) ++deg[e];
        int best = -1, bd = -1;
        for (const auto& [e, d] : deg)
            if (d > bd) { best = e; bd = d; }
        out.push_back(best);
        SetFamily rest;
        for (auto& s : sets)
            if (!std::binary_search(s.begin(), s.end(), best)) rest.push_back(std::move(s));
        sets = std::move(rest);
    }
    return out;
}

std::vector<SetFamily> split(const SetFamily& sets) {
    std::map<int, int> owner;
    std::vector<int> parent(sets.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (int e : sets[i]) {
            auto it = owner.find(e);
            if (it == owner.end())
                owner[e] = static_cast<int>(i);
            else
                parent[find(static_cast<int>(i))] = find(it->second);
        }
    std::map<int, std::size_t> slot;
    std::vector<SetFamily> out;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        int r = find(static_cast<int>(i));
        auto it = slot.find(r);
        if (it == slot.end()) {
            slot[r] = out.size();
            out.push_back({sets[i]});
        } else {
            out[it->second].push_back(sets[i]);
        }
    }
    return out;
}

SetFamily without_element_sets(const SetFamily& sets, int e) {
    SetFamily out;
    for (const auto& s : sets)
        if (!std::binary_search(s.begin(), s.end(), e)) out.push_back(s);
    return out;
}

// Optimal solution of size < ub, or nullopt.
std::optional<Sol> search(SetFamily sets, int ub, HittingSetStats& st) {
    ++st.nodes;
    if (ub <= 0) return std::nullopt;
    Sol forced;
    if (!reduce(sets, forced)) return std::nullopt;
    int base = static_cast<int>(forced.size());
    if (base >= ub) return std::nullopt;
    if (sets.empty()) return forced;

    auto comps = split(sets);
    if (comps.size() > 1) {
        std::vector<int> lbs;
        int lbsum = 0;
        for (const auto& c : comps) {
            lbs.push_back(packing_bound(c));
            lbsum += lbs.back();
        }
        if (base + lbsum >= ub) return std::nullopt;
        Sol out = forced;
        int spent = base;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            lbsum -= lbs[i];
            auto r = search(comps[i], ub - spent - lbsum, st);
            if (!r) return std::nullopt;
            spent += static_cast<int>(r->size());
            out.insert(out.end(), r->begin(), r->end());
        }
        return out;
    }

    int lb = packing_bound(sets);
    if (base + lb >= ub) return std::nullopt;
    std::optional<Sol> best;
    Sol g = greedy(sets);
    if (base + static_cast<int>(g.size()) < ub) {
        ub = base + static_cast<int>(g.size());
        best = g;
        if (static_cast<int>(g.size()) == lb) {
            best->insert(best->end(), forced.begin(), forced.end());
            return best;
        }
    }

    // Branch on the smallest set: take e_i, forbid e_1..e_{i-1}.
    std::size_t pick = 0;
    for (std::size_t i = 1; i < sets.size(); ++i)
        if (sets[i].size() < sets[pick].size()) pick = i;
    std::map<int, int> deg;
    for (const auto& s : sets)
        for (int e : s) ++deg[e];
    std::vector<int> branch = sets[pick];
    std::stable_sort(branch.begin(), branch.end(), [&](int a, int b) { return deg[a] > deg[b]; });

    SetFamily cur = sets;
    for (std::size_t i = 0; i < branch.size(); ++i) {
        int e = branch[i];
        auto r = search(without_element_sets(cur, e), ub - base - 1, st);
        if (r) {
            r->push_back(e);
            ub = base + static_cast<int>(r->size());
            best = std::move(r);
        }
        // Forbid e in later branches.
        bool dead = false;
        for (auto& s : cur) {
            s.erase(std::remove(s.begin(), s.end(), e), s.end());
            if (s.empty()) dead = true;
        }
        if (dead) break;
    }
    if (!best) return std::nullopt;
    best->insert(best->end(), forced.begin(), forced.end());
    return best;
}

SetFamily normalized(const SetFamily& sets) {
    SetFamily out = sets;
    for (auto& s : out) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return out;
}

}  // namespace

std::optional<int> min_hitting_set_size(const SetFamily& sets, HittingSetStats* stats) {
    HittingSetStats local;
    auto& st = stats ? *stats : local;
    auto s = normalized(sets);
    for (const auto& x : s)
        if (x.empty()) return std::nullopt;
    int total = 0;
    for (const auto& x : s) total += static_cast<int>(x.size());
    auto r = search(s, total + 1, st);
    if (!r) return std::nullopt;
    return static_cast<int>(r->size());
}

bool hitting_set_within(std::size_t n, const SetFamily& sets, const std::vector<int>& include,
                        const std::vector<int>& exclude, int budget, std::vector<int>* out,
                        HittingSetStats* stats) {
    (void)n;
    HittingSetStats local;
    auto& st = stats ? *stats : local;
    ++st.decision_solves;
    std::vector<int> inc = include, exc = exclude;
    std::sort(inc.begin(), inc.end());
    std::sort(exc.begin(), exc.end());
    if (static_cast<int>(inc.size()) > budget) return false;
    SetFamily rest;
    for (auto s : normalized(sets)) {
        bool hit = false;
        for (int e : s)
            if (std::binary_search(inc.begin(), inc.end(), e)) { hit = true; break; }
        if (hit) continue;
        s.erase(std::remove_if(s.begin(), s.end(),
                               [&](int e) { return std::binary_search(exc.begin(), exc.end(), e); }),
                s.end());
        if (s.empty()) return false;
        rest.push_back(std::move(s));
    }
    auto r = search(rest, budget - static_cast<int>(inc.size()) + 1, st);
    if (!r) return false;
    if (out) {
        *out = inc;
        out->insert(out->end(), r->begin(), r->end());
        std::sort(out->begin(), out->end());
    }
    return true;
}

std::optional<std::vector<int>> min_hitting_set(std::size_t n, const SetFamily& sets,
                                                HittingSetStats* stats) {
    HittingSetStats local;
    auto& st = stats ? *stats : local;
    auto s = normalized(sets);
    for (const auto& x : s)
        if (x.empty()) return std::nullopt;
    if (s.empty()) return std::vector<int>{};
    int total = 0;
    for (const auto& x : s) total += static_cast<int>(x.size());
    auto first = search(s, total + 1, st);
    if (!first) return std::nullopt;
    const int rho = static_cast<int>(first->size());
    std::vector<int> cur = *first;
    std::sort(cur.begin(), cur.end());

    // Canonical re-selection: fix elements in increasing id order.
    std::vector<char> relevant(n, 0);
    for (const auto& x : s)
        for (int e : x) relevant[e] = 1;
    std::vector<int> chosen, excluded;
    for (int e = 0; e < static_cast<int>(n) && static_cast<int>(chosen.size()) < rho; ++e) {
        if (!relevant[e]) continue;
        bool ok;
        bool cur_fits = std::binary_search(cur.begin(), cur.end(), e);
        for (int x : excluded)
            if (std::binary_search(cur.begin(), cur.end(), x)) cur_fits = false;
        if (cur_fits) {
            ok = true;
        } else {
            auto inc = chosen;
            inc.push_back(e);
            std::vector<int> out;
            ok = hitting_set_within(n, s, inc, excluded, rho, &out, &st);
            if (ok) cur = out;
        }
        if (ok)
            chosen.push_back(e);
        else
            excluded.push_back(e);
    }
    return chosen;
}

}  // namespace resil
