#include "resil/database.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace resil {

namespace {

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

bool ConstLess::operator()(const std::string& a, const std::string& b) const {
    bool da = all_digits(a), db = all_digits(b);
    if (da && db) {
        auto sa = a.find_first_not_of('0'), sb = b.find_first_not_of('0');
        std::string ta = sa == std::string::npos ? "" : a.substr(sa);
        std::string tb = sb == std::string::npos ? "" : b.substr(sb);
        if (ta.size() != tb.size()) return ta.size() < tb.size();
        if (ta != tb) return ta < tb;
        return a < b;
    }
    if (da != db) return da;
    return a < b;
}

bool TupleLess::operator()(const std::vector<std::string>& a,
                           const std::vector<std::string>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), ConstLess{});
}

bool Fact::operator<(const Fact& o) const {
    if (relation != o.relation) return relation < o.relation;
    return TupleLess{}(args, o.args);
}

std::string Fact::str() const {
    std::string s = relation + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) s += ",";
        s += args[i];
    }
    return s + ")";
}

bool Database::add(const std::string& rel, std::vector<std::string> args) {
    if (args.empty()) throw DatabaseError("tuple of " + rel + " has no values");
    auto it = arity_.find(rel);
    if (it == arity_.end())
        arity_[rel] = static_cast<int>(args.size());
    else if (it->second != static_cast<int>(args.size()))
        throw DatabaseError("relation " + rel + " has tuples of arity " +
                            std::to_string(it->second) + " and " + std::to_string(args.size()));
    return rels_[rel].insert(std::move(args)).second;
}

bool Database::erase(const Fact& f) {
    auto it = rels_.find(f.relation);
    if (it == rels_.end()) return false;
    return it->second.erase(f.args) > 0;
}

bool Database::contains(const Fact& f) const {
    auto it = rels_.find(f.relation);
    return it != rels_.end() && it->second.count(f.args) > 0;
}

const Database::TupleSet& Database::tuples(const std::string& rel) const {
    static const TupleSet empty;
    auto it = rels_.find(rel);
    return it == rels_.end() ? empty : it->second;
}

int Database::arity(const std::string& rel) const {
    auto it = arity_.find(rel);
    return it == arity_.end() ? 0 : it->second;
}

std::size_t Database::size() const {
    std::size_t n = 0;
    for (const auto& [r, ts] : rels_) n += ts.size();
    return n;
}

std::vector<Fact> Database::facts() const {
    std::vector<Fact> out;
    for (const auto& [r, ts] : rels_)
        for (const auto& t : ts) out.push_back({r, t});
    return out;
}

std::set<std::string, ConstLess> Database::constants() const {
    std::set<std::string, ConstLess> out;
    for (const auto& [r, ts] : rels_)
        for (const auto& t : ts) out.insert(t.begin(), t.end());
    return out;
}

Database Database::without(const std::vector<Fact>& removed) const {
    Database d = *this;
    for (const auto& f : removed) d.erase(f);
    return d;
}

Database Database::renamed_relations(const std::map<std::string, std::string>& m,
                                     bool drop_unmapped) const {
    Database d;
    for (const auto& [r, ts] : rels_) {
        auto it = m.find(r);
        if (it == m.end() && drop_unmapped) continue;
        const std::string& name = it == m.end() ? r : it->second;
        for (const auto& t : ts) d.add(name, t);
    }
    return d;
}

Fact parse_fact(const std::string& text) {
    std::size_t p = 0;
    auto skip = [&] {
        while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    };
    auto ident = [&](const char* what) {
        skip();
        std::size_t b = p;
        while (p < text.size() && (std::isalnum(static_cast<unsigned char>(text[p])) ||
                                   text[p] == '_' || text[p] == '-' || text[p] == '.'))
            ++p;
        if (b == p) throw ParseError(std::string("expected ") + what, b);
        return text.substr(b, p - b);
    };
    Fact f;
    f.relation = ident("relation name");
    if (p + 1 < text.size() && text[p] == '^' && text[p + 1] == 'x') p += 2;
    skip();
    if (p >= text.size() || text[p] != '(') throw ParseError("expected '('", p);
    ++p;
    while (true) {
        f.args.push_back(ident("constant"));
        skip();
        if (p < text.size() && text[p] == ',') { ++p; continue; }
        if (p < text.size() && text[p] == ')') { ++p; break; }
        throw ParseError("expected ',' or ')'", p);
    }
    skip();
    if (p < text.size() && text[p] == '.') ++p;
    skip();
    if (p != text.size()) throw ParseError("trailing characters after tuple", p);
    return f;
}

Database load_database(const std::string& text) {
    Database d;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0, offset = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        std::string body = hash == std::string::npos ? line : line.substr(0, hash);
        if (body.find_first_not_of(" \t\r") != std::string::npos) {
            Fact f;
            try {
                f = parse_fact(body);
            } catch (const ParseError& e) {
                throw ParseError("line " + std::to_string(lineno) + ": " + e.what(),
                                 offset + e.position());
            }
            try {
                d.add(f);
            } catch (const DatabaseError& e) {
                throw DatabaseError("line " + std::to_string(lineno) + ": " + e.what());
            }
        }
        offset += line.size() + 1;
    }
    return d;
}

std::string serialize_database(const Database& d) {
    std::string out;
    for (const auto& f : d.facts()) out += f.str() + "\n";
    return out;
}

void check_arities(const Database& d, const Query& q) {
    for (const auto& [name, decl] : q.relations()) {
        int a = d.arity(name);
        if (a != 0 && a != decl.arity)
            throw DatabaseError("relation " + name + " has arity " + std::to_string(a) +
                                " in the database but " + std::to_string(decl.arity) +
                                " in the query");
    }
}

std::size_t WitnessSet::index_of(const Fact& f) const {
    auto it = std::lower_bound(facts.begin(), facts.end(), f);
    if (it != facts.end() && *it == f) return static_cast<std::size_t>(it - facts.begin());
    return facts.size();
}

namespace {

struct Join {
    const Query& q;
    std::vector<std::vector<int>> var_idx;  // per atom: variable index per position
    // Per atom: candidate tuples as constant ids and fact ids.
    std::vector<std::vector<std::pair<std::vector<int>, std::size_t>>> cands;
    std::vector<int> asg;
    std::vector<std::size_t> used;
    std::vector<std::vector<int>> out_vals;
    std::vector<std::vector<std::size_t>> out_support;
    std::size_t limit = static_cast<std::size_t>(-1);

    explicit Join(const Query& qq) : q(qq) {}

    void rec(std::size_t i) {
        if (out_vals.size() >= limit) return;
        if (i == q.size()) {
            out_vals.push_back(asg);
            auto s = used;
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            out_support.push_back(std::move(s));
            return;
        }
        const auto& vi = var_idx[i];
        for (const auto& [t, fid] : cands[i]) {
            std::vector<int> bound;
            bool ok = true;
            for (std::size_t k = 0; k < vi.size(); ++k) {
                int& slot = asg[vi[k]];
                if (slot < 0) {
                    slot = t[k];
                    bound.push_back(vi[k]);
                } else if (slot != t[k]) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                used.push_back(fid);
                rec(i + 1);
                used.pop_back();
            }
            for (int b : bound) asg[b] = -1;
        }
    }
};

WitnessSet run_join(const Database& d, const Query& q, std::size_t limit) {
    check_arities(d, q);
    WitnessSet ws;
    for (const auto& [name, decl] : q.relations())
        for (const auto& t : d.tuples(name)) ws.facts.push_back({name, t});
    std::sort(ws.facts.begin(), ws.facts.end());
    for (const auto& f : ws.facts) ws.endogenous.push_back(!q.is_exogenous(f.relation));

    std::map<std::string, int, ConstLess> cid;
    std::vector<std::string> cname;
    for (const auto& f : ws.facts)
        for (const auto& c : f.args)
            if (cid.try_emplace(c, static_cast<int>(cname.size())).second) cname.push_back(c);

    const auto& vars = q.variables();
    Join j(q);
    j.limit = limit;
    for (const auto& a : q.atoms()) {
        std::vector<int> vi;
        for (const auto& v : a.args)
            vi.push_back(static_cast<int>(std::find(vars.begin(), vars.end(), v) - vars.begin()));
        j.var_idx.push_back(vi);
        std::vector<std::pair<std::vector<int>, std::size_t>> cs;
        Fact key{a.relation, {}};
        auto lo = std::lower_bound(ws.facts.begin(), ws.facts.end(), key);
        for (auto it = lo; it != ws.facts.end() && it->relation == a.relation; ++it) {
            std::vector<int> t;
            for (const auto& c : it->args) t.push_back(cid[c]);
            // Equal variables within the atom demand equal values.
            bool ok = true;
            for (std::size_t x = 0; x < vi.size() && ok; ++x)
                for (std::size_t y = x + 1; y < vi.size() && ok; ++y)
                    if (vi[x] == vi[y] && t[x] != t[y]) ok = false;
            if (ok) cs.push_back({std::move(t), static_cast<std::size_t>(it - ws.facts.begin())});
        }
        j.cands.push_back(std::move(cs));
    }
    j.asg.assign(vars.size(), -1);
    j.rec(0);
    for (std::size_t w = 0; w < j.out_vals.size(); ++w) {
        Witness wit;
        for (int c : j.out_vals[w]) wit.values.push_back(cname[c]);
        wit.support = std::move(j.out_support[w]);
        ws.witnesses.push_back(std::move(wit));
    }
    return ws;
}

}  // namespace

WitnessSet enumerate_witnesses(const Database& d, const Query& q) {
    return run_join(d, q, static_cast<std::size_t>(-1));
}

bool satisfies(const Database& d, const Query& q) { return !run_join(d, q, 1).witnesses.empty(); }

}  // namespace resil
