// resil: resilience analysis front end.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "resil/analysis.hpp"
#include "resil/classifier.hpp"
#include "resil/database.hpp"
#include "resil/gadgets.hpp"
#include "resil/ijp.hpp"
#include "resil/query.hpp"
#include "resil/solvers.hpp"

using json = nlohmann::ordered_json;
using namespace resil;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchema = 1;

enum Exit { kOk = 0, kNegative = 1, kUsage = 2, kBudget = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// FNV-1a, enough to tell inputs apart in a run record.
std::string fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream o;
    o << std::hex << std::setw(16) << std::setfill('0') << h;
    return o.str();
}

struct Input {
    std::string path, text;
};

Input input(const std::string& path) { return {path, read_file(path)}; }

Query load_query(const Input& in) {
    std::string t = in.text;
    // Query files may hold comment lines; the query itself is everything else.
    std::istringstream s(t);
    std::string line, body;
    while (std::getline(s, line)) {
        auto p = line.find_first_not_of(" \t\r");
        if (p == std::string::npos || line[p] == '#') continue;
        body += line + " ";
    }
    return parse_query(body);
}

std::vector<std::string> parse_tuple(std::string s) {
    if (!s.empty() && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (const auto& v : out)
        if (v.empty()) throw UsageError("bad tuple '" + s + "'");
    return out;
}

json facts_json(const std::vector<Fact>& fs) {
    json a = json::array();
    for (const auto& f : fs) a.push_back(f.str());
    return a;
}

json finding_json(const StructuralFinding& f) {
    return {{"kind", to_string(f.kind)},
            {"atoms", f.atoms},
            {"variables", f.variables},
            {"citation", f.citation},
            {"detail", f.detail}};
}

json classification_json(const Classification& c) {
    json j;
    j["verdict"] = to_string(c.verdict);
    j["solver_plan"] = c.solver_plan;
    j["normalized_query"] = serialize_query(c.normalized_query);
    j["minimized_query"] = serialize_query(c.minimized_query);
    j["findings"] = json::array();
    for (const auto& f : c.findings) j["findings"].push_back(finding_json(f));
    j["notes"] = c.notes;
    if (!c.components.empty()) {
        j["components"] = json::array();
        for (const auto& s : c.components) j["components"].push_back(classification_json(s));
    }
    return j;
}

json result_json(const ResilienceResult& r, bool timings) {
    json j;
    j["status"] = r.feasible() ? "ok" : "infeasible";
    j["method"] = r.method;
    j["k"] = r.feasible() ? json(r.k) : json(nullptr);
    j["gamma"] = facts_json(r.gamma);
    j["witness_count"] = r.witness_count;
    if (!r.verdict.empty()) j["verdict"] = r.verdict;
    if (r.cut_value >= 0) j["cut_value"] = r.cut_value;
    j["notes"] = r.notes;
    if (timings) j["millis"] = r.millis;
    return j;
}

json ijp_report_json(const IJPReport& r) {
    json j;
    const ConditionResult* cs[] = {&r.c1, &r.c2, &r.c3, &r.c4, &r.c5};
    json conds = json::array();
    for (int i = 0; i < 5; ++i) conds.push_back({{"condition", i + 1}, {"ok", cs[i]->ok}, {"evidence", cs[i]->evidence}});
    j["pass"] = r.pass();
    j["conditions"] = conds;
    j["witnesses_with_a"] = r.witnesses_with_a;
    j["witnesses_with_b"] = r.witnesses_with_b;
    j["closure_added"] = facts_json(r.closure_added);
    j["resilience"] = {
        {{"removed", "none"}, {"rho", r.rho}, {"gamma", facts_json(r.gamma)}},
        {{"removed", "a"}, {"rho", r.rho_minus_a}, {"gamma", facts_json(r.gamma_minus_a)}},
        {{"removed", "b"}, {"rho", r.rho_minus_b}, {"gamma", facts_json(r.gamma_minus_b)}},
        {{"removed", "a,b"}, {"rho", r.rho_minus_ab}, {"gamma", facts_json(r.gamma_minus_ab)}},
    };
    j["closed_database"] = facts_json(r.closed.facts());
    return j;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

// Text rendering of a JSON record: "key: value" lines, nested records indented.
void render_text(std::ostream& out, const json& j, int indent = 0) {
    std::string pad(indent, ' ');
    for (const auto& [key, val] : j.items()) {
        if (val.is_object()) {
            out << pad << key << ":\n";
            render_text(out, val, indent + 2);
        } else if (val.is_array() && !val.empty() && val.front().is_object()) {
            out << pad << key << ":\n";
            for (const auto& e : val) {
                out << pad << "  -\n";
                render_text(out, e, indent + 4);
            }
        } else if (val.is_array()) {
            std::vector<std::string> parts;
            for (const auto& e : val) parts.push_back(e.is_string() ? e.get<std::string>() : e.dump());
            out << pad << key << ": [" << join(parts, ", ") << "]\n";
        } else if (val.is_string()) {
            out << pad << key << ": " << val.get<std::string>() << "\n";
        } else {
            out << pad << key << ": " << val.dump() << "\n";
        }
    }
}

struct Ctx {
    bool as_json = false;
    bool timings = false;
};

json record(const std::string& command, const std::vector<Input>& ins) {
    json r;
    r["schema"] = kSchema;
    r["version"] = kVersion;
    r["command"] = command;
    json files = json::array();
    for (const auto& i : ins) files.push_back({{"path", i.path}, {"fnv1a", fnv1a(i.text)}});
    r["inputs"] = files;
    return r;
}

void emit(const Ctx& ctx, const json& rec) {
    if (ctx.as_json)
        std::cout << rec.dump(2) << "\n";
    else
        render_text(std::cout, rec);
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// --- commands --------------------------------------------------------------

int cmd_classify(const Ctx& ctx, const std::string& qpath) {
    auto qi = input(qpath);
    auto q = load_query(qi);
    auto rec = record("classify", {qi});
    rec["query"] = serialize_query(q);
    rec["classification"] = classification_json(classify(q));
    emit(ctx, rec);
    return kOk;
}

int cmd_solve(const Ctx& ctx, const std::string& qpath, const std::string& dpath, const std::string& method) {
    auto qi = input(qpath), di = input(dpath);
    auto q = load_query(qi);
    auto d = load_database(di.text);
    check_arities(d, q);
    ResilienceResult r;
    if (method == "auto") {
        r = solve(d, q);
    } else {
        auto names = method_names();
        if (std::find(names.begin(), names.end(), method) == names.end())
            throw UsageError("unknown method '" + method + "'; expected auto or one of " + join(names, ", "));
        r = run_method(method, d, q);
    }
    auto rec = record("solve", {qi, di});
    rec["query"] = serialize_query(q);
    rec["requested_method"] = method;
    rec["result"] = result_json(r, ctx.timings);
    emit(ctx, rec);
    return r.feasible() ? kOk : kNegative;
}

int cmd_witnesses(const Ctx& ctx, const std::string& qpath, const std::string& dpath) {
    auto qi = input(qpath), di = input(dpath);
    auto q = load_query(qi);
    auto d = load_database(di.text);
    check_arities(d, q);
    auto ws = enumerate_witnesses(d, q);
    auto rec = record("witnesses", {qi, di});
    rec["variables"] = q.variables();
    json arr = json::array();
    for (const auto& w : ws.witnesses) {
        std::vector<Fact> sup;
        for (auto i : w.support) sup.push_back(ws.facts[i]);
        arr.push_back({{"values", "(" + join(w.values, ",") + ")"}, {"support", facts_json(sup)}});
    }
    rec["count"] = ws.witnesses.size();
    rec["witnesses"] = arr;
    emit(ctx, rec);
    return kOk;
}

int cmd_minimize(const Ctx& ctx, const std::string& qpath) {
    auto qi = input(qpath);
    auto q = load_query(qi);
    auto m = minimize(q);
    auto rec = record("minimize", {qi});
    rec["query"] = serialize_query(q);
    rec["minimized"] = serialize_query(m);
    rec["normalized"] = serialize_query(normalize(m));
    rec["removed_atoms"] = q.size() - m.size();
    emit(ctx, rec);
    return kOk;
}

int cmd_ijp_check(const Ctx& ctx, const std::string& qpath, const std::string& dpath, const std::string& rel,
                  const std::string& a, const std::string& b) {
    auto qi = input(qpath), di = input(dpath);
    IJPCandidate c{load_database(di.text), load_query(qi), rel, parse_tuple(a), parse_tuple(b)};
    check_arities(c.database, c.query);
    auto rep = check_ijp(c);
    auto rec = record("ijp check", {qi, di});
    rec["query"] = serialize_query(c.query);
    rec["pair"] = {Fact{rel, c.tuple_a}.str(), Fact{rel, c.tuple_b}.str()};
    rec["report"] = ijp_report_json(rep);
    emit(ctx, rec);
    return rep.pass() ? kOk : kNegative;
}

int cmd_ijp_search(const Ctx& ctx, const std::string& qpath, int max_joins, std::uint64_t budget, bool first_only) {
    auto qi = input(qpath);
    auto q = load_query(qi);
    IJPSearchOptions opt;
    opt.max_joins = max_joins;
    opt.budget = budget;
    opt.first_only = first_only;
    auto t0 = std::chrono::steady_clock::now();
    auto res = ijp_search(q, opt);
    auto rec = record("ijp search", {qi});
    rec["query"] = serialize_query(q);
    rec["max_joins"] = max_joins;
    rec["budget"] = budget;
    rec["complete"] = res.complete;
    rec["partitions_per_join"] = res.partitions_per_join;
    rec["candidates_checked"] = res.candidates_checked;
    rec["found_count"] = res.found.size();
    json arr = json::array();
    for (const auto& f : res.found) {
        json blocks = json::array();
        for (const auto& bl : f.partition) blocks.push_back("{" + join(bl, ",") + "}");
        arr.push_back({{"joins", f.joins},
                       {"partition", blocks},
                       {"pair", {Fact{f.candidate.relation, f.candidate.tuple_a}.str(),
                                 Fact{f.candidate.relation, f.candidate.tuple_b}.str()}},
                       {"database", facts_json(f.candidate.database.facts())},
                       {"report", ijp_report_json(f.report)}});
    }
    rec["found"] = arr;
    if (ctx.timings) rec["millis"] = ms_since(t0);
    emit(ctx, rec);
    if (!res.found.empty()) return kOk;
    return res.complete ? kNegative : kBudget;
}

std::string claim_name(ReductionInstance::Claim c) {
    switch (c) {
        case ReductionInstance::Claim::SatIffAtMostK: return "sat-iff-at-most-k";
        case ReductionInstance::Claim::MaxSatIffAtMostK: return "maxsat-iff-at-most-k";
        case ReductionInstance::Claim::EqualsSource: return "equals-source";
    }
    return "?";
}

const std::vector<std::string>& gadget_names() {
    static const std::vector<std::string> g = [] {
        std::vector<std::string> v{"vc", "path", "chain", "triangle", "permAB", "3confAC"};
        for (const auto& u : chain_unary_variants()) v.push_back("chain-" + u);
        return v;
    }();
    return g;
}

int cmd_gadget(const Ctx& ctx, const std::string& name, const std::string& path, bool verify,
               const std::string& out_dir, const std::string& qpath, int r, int max_vars, std::size_t max_facts) {
    auto in = input(path);
    std::vector<Input> ins{in};
    ReductionInstance inst;
    if (name == "vc") {
        inst = gen_vc_instance(parse_graph(in.text));
    } else if (name == "path") {
        if (qpath.empty()) throw UsageError("gadget path needs --query");
        auto qi = input(qpath);
        ins.push_back(qi);
        inst = gen_path_reduction(gen_vc_instance(parse_graph(in.text)).database, load_query(qi));
    } else {
        auto f = parse_dimacs(in.text);
        if (name == "chain")
            inst = gen_chain_3sat(f);
        else if (name == "triangle")
            inst = gen_triangle_3sat(f);
        else if (name == "permAB")
            inst = gen_permAB_3sat(f);
        else if (name == "3confAC")
            inst = gen_3confAC_max2sat(f, r < 0 ? f.m() : r);
        else if (name.rfind("chain-", 0) == 0)
            inst = gen_chain_unary_3sat(f, name.substr(6));
        else
            throw UsageError("unknown gadget '" + name + "'; expected one of " + join(gadget_names(), ", "));
    }
    auto rec = record("gadget " + name, ins);
    rec["generator"] = inst.generator;
    rec["query"] = serialize_query(inst.query);
    rec["facts"] = inst.database.size();
    rec["k"] = inst.k;
    if (inst.r >= 0) rec["r"] = inst.r;
    if (inst.formula) rec["formula"] = format_cnf(*inst.formula);
    rec["claim"] = claim_name(inst.claim);
    rec["claim_text"] = inst.claim_text;
    json params = json::object();
    for (const auto& [k, v] : inst.params) params[k] = v;
    rec["params"] = params;
    int code = kOk;
    if (verify) {
        auto v = verify_reduction(inst, {max_vars, max_facts});
        rec["verification"] = {{"verdict", to_string(v.verdict)},
                               {"rho", v.rho},
                               {"k", v.k},
                               {"rho_equals_k", v.rho_equals_k},
                               {"detail", v.detail}};
        if (v.verdict == VerifyResult::Verdict::Mismatch) code = kNegative;
        if (v.verdict == VerifyResult::Verdict::Unverified) code = kBudget;
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        auto write = [&](const std::string& file, const std::string& text) {
            std::ofstream o(std::filesystem::path(out_dir) / file, std::ios::binary);
            if (!o) throw UsageError("cannot write to '" + out_dir + "'");
            o << text;
        };
        write("query.txt", serialize_query(inst.query) + "\n");
        write("database.txt", serialize_database(inst.database));
        json claim = rec;
        claim.erase("inputs");
        write("claim.json", claim.dump(2) + "\n");
        rec["written"] = {"query.txt", "database.txt", "claim.json"};
    }
    emit(ctx, rec);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resilience of conjunctive queries with self-joins: classify, solve, IJP search, gadgets"};
    app.require_subcommand(1);
    Ctx ctx;
    app.add_flag("--json", ctx.as_json, "machine-readable output");
    app.add_flag("--timings", ctx.timings, "include wall-clock timings (output is then not reproducible)");
    app.set_version_flag("--version", kVersion);

    std::string qpath, dpath, method = "auto", rel, ta, tb, gname, gin, out_dir, gquery;
    int max_joins = 3, r = -1, max_vars = 8;
    std::size_t max_facts = 400;
    std::uint64_t budget = 1000000;
    bool verify = false, first_only = false;

    auto* c_classify = app.add_subcommand("classify", "classify a query");
    c_classify->add_option("query", qpath, "query file")->required();

    auto* c_solve = app.add_subcommand("solve", "compute resilience");
    c_solve->add_option("query", qpath, "query file")->required();
    c_solve->add_option("database", dpath, "database file")->required();
    c_solve->add_option("--method", method, "auto, exact or a named solver");

    auto* c_wit = app.add_subcommand("witnesses", "list witnesses with their supports");
    c_wit->add_option("query", qpath)->required();
    c_wit->add_option("database", dpath)->required();

    auto* c_min = app.add_subcommand("minimize", "minimize and normalize a query");
    c_min->add_option("query", qpath)->required();

    auto* c_ijp = app.add_subcommand("ijp", "independent join paths");
    c_ijp->require_subcommand(1);
    auto* c_check = c_ijp->add_subcommand("check", "check a candidate IJP");
    c_check->add_option("query", qpath)->required();
    c_check->add_option("database", dpath)->required();
    c_check->add_option("--rel", rel, "relation of the pair")->required();
    c_check->add_option("--a", ta, "first tuple, e.g. 1,2")->required();
    c_check->add_option("--b", tb, "second tuple")->required();
    auto* c_search = c_ijp->add_subcommand("search", "search canonical-witness quotients for IJPs");
    c_search->add_option("query", qpath)->required();
    c_search->add_option("--max-joins", max_joins, "largest number of joins")->check(CLI::Range(1, 6));
    c_search->add_option("--budget", budget, "partition budget");
    c_search->add_flag("--first", first_only, "stop at the first join count with a find");

    auto* c_gadget = app.add_subcommand("gadget", "build a reduction instance");
    c_gadget->add_option("name", gname, "generator")->required();
    c_gadget->add_option("input", gin, "DIMACS formula or graph file")->required();
    c_gadget->add_flag("--verify", verify, "check the claim with the exact solver");
    c_gadget->add_option("--out", out_dir, "write query, database and claim files here");
    c_gadget->add_option("--query", gquery, "target query (path gadget)");
    c_gadget->add_option("--r", r, "Max2SAT target (3confAC; default m)");
    c_gadget->add_option("--max-vars", max_vars, "verification budget: formula variables");
    c_gadget->add_option("--max-facts", max_facts, "verification budget: database facts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*c_classify) return cmd_classify(ctx, qpath);
        if (*c_solve) return cmd_solve(ctx, qpath, dpath, method);
        if (*c_wit) return cmd_witnesses(ctx, qpath, dpath);
        if (*c_min) return cmd_minimize(ctx, qpath);
        if (*c_check) return cmd_ijp_check(ctx, qpath, dpath, rel, ta, tb);
        if (*c_search) return cmd_ijp_search(ctx, qpath, max_joins, budget, first_only);
        if (*c_gadget) return cmd_gadget(ctx, gname, gin, verify, out_dir, gquery, r, max_vars, max_facts);
    } catch (const PreconditionError& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
