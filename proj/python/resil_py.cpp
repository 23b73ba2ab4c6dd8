#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "resil/classifier.hpp"
#include "resil/database.hpp"
#include "resil/gadgets.hpp"
#include "resil/ijp.hpp"
#include "resil/query.hpp"
#include "resil/solvers.hpp"

namespace py = pybind11;
using namespace resil;

namespace {

ResilienceResult solve_with(const Database& d, const Query& q, const std::string& method) {
    check_arities(d, q);
    if (method == "auto") return solve(d, q);
    return run_method(method, d, q);
}

py::dict verify_dict(const VerifyResult& v) {
    py::dict out;
    out["verdict"] = to_string(v.verdict);
    out["rho"] = v.rho;
    out["k"] = v.k;
    out["satisfiable"] = v.satisfiable;
    out["maxsat"] = v.maxsat;
    out["rho_equals_k"] = v.rho_equals_k;
    out["detail"] = v.detail;
    return out;
}

}  // namespace

PYBIND11_MODULE(_resil, m) {
    m.doc() = "resilience of conjunctive queries with self-joins";

    // all input errors surface as ValueError subclasses
    auto value_error = py::handle(PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", value_error);
    py::register_exception<QueryError>(m, "QueryError", value_error);
    py::register_exception<DatabaseError>(m, "DatabaseError", value_error);
    py::register_exception<PreconditionError>(m, "PreconditionError", value_error);
    py::register_exception<FormatError>(m, "FormatError", value_error);

    py::class_<Atom>(m, "Atom")
        .def_readonly("relation", &Atom::relation)
        .def_readonly("args", &Atom::args);

    py::class_<Query>(m, "Query")
        .def(py::init([](const std::string& text) { return parse_query(text); }), py::arg("text"))
        .def_property_readonly("atoms", &Query::atoms)
        .def_property_readonly("variables", &Query::variables)
        .def_property_readonly("exogenous", &Query::exogenous_relations)
        .def_property_readonly("self_join_free", &Query::self_join_free)
        .def("__len__", &Query::size)
        .def("__eq__", [](const Query& a, const Query& b) { return a == b; })
        .def("__str__", &serialize_query)
        .def("__repr__", [](const Query& q) { return "Query('" + serialize_query(q) + "')"; });

    py::class_<Fact>(m, "Fact")
        .def(py::init([](const std::string& text) { return parse_fact(text); }), py::arg("text"))
        .def_readonly("relation", &Fact::relation)
        .def_readonly("args", &Fact::args)
        .def("__eq__", [](const Fact& a, const Fact& b) { return a == b; })
        .def("__lt__", [](const Fact& a, const Fact& b) { return a < b; })
        .def("__hash__", [](const Fact& f) { return py::hash(py::str(f.str())); })
        .def("__str__", &Fact::str)
        .def("__repr__", [](const Fact& f) { return "Fact('" + f.str() + "')"; });

    py::class_<Database>(m, "Database")
        .def(py::init<>())
        .def(py::init([](const std::string& text) { return load_database(text); }), py::arg("text"))
        .def("add", py::overload_cast<const Fact&>(&Database::add))
        .def("erase", &Database::erase)
        .def("__contains__", &Database::contains)
        .def("__len__", &Database::size)
        .def("__eq__", [](const Database& a, const Database& b) { return a == b; })
        .def_property_readonly("facts", &Database::facts)
        .def_property_readonly("constants",
                               [](const Database& d) {
                                   auto c = d.constants();
                                   return std::vector<std::string>(c.begin(), c.end());
                               })
        .def("without", &Database::without)
        .def("__str__", &serialize_database);

    m.def("satisfies", &satisfies, py::arg("database"), py::arg("query"));
    m.def(
        "witnesses",
        [](const Database& d, const Query& q) {
            auto ws = enumerate_witnesses(d, q);
            py::list out;
            for (const auto& w : ws.witnesses) {
                std::vector<Fact> support;
                for (auto i : w.support) support.push_back(ws.facts[i]);
                out.append(py::make_tuple(w.values, support));
            }
            return out;
        },
        py::arg("database"), py::arg("query"), "list of (values, support) pairs");
    m.def("minimize", &minimize);
    m.def("normalize", &normalize);
    m.def("components", &components);

    py::class_<StructuralFinding>(m, "Finding")
        .def_property_readonly("kind", [](const StructuralFinding& f) { return to_string(f.kind); })
        .def_readonly("atoms", &StructuralFinding::atoms)
        .def_readonly("variables", &StructuralFinding::variables)
        .def_readonly("citation", &StructuralFinding::citation)
        .def_readonly("detail", &StructuralFinding::detail);

    py::class_<Classification>(m, "Classification")
        .def_property_readonly("verdict", [](const Classification& c) { return to_string(c.verdict); })
        .def_readonly("findings", &Classification::findings)
        .def_readonly("solver_plan", &Classification::solver_plan)
        .def_readonly("normalized_query", &Classification::normalized_query)
        .def_readonly("minimized_query", &Classification::minimized_query)
        .def_readonly("components", &Classification::components)
        .def_readonly("notes", &Classification::notes);
    m.def("classify", &classify, py::arg("query"));

    py::class_<ResilienceResult>(m, "ResilienceResult")
        .def_property_readonly("feasible", &ResilienceResult::feasible)
        .def_readonly("k", &ResilienceResult::k)
        .def_readonly("gamma", &ResilienceResult::gamma)
        .def_readonly("method", &ResilienceResult::method)
        .def_readonly("witness_count", &ResilienceResult::witness_count)
        .def_readonly("verdict", &ResilienceResult::verdict)
        .def_readonly("notes", &ResilienceResult::notes);
    m.def("solve", &solve_with, py::arg("database"), py::arg("query"), py::arg("method") = "auto");
    m.def("method_names", &method_names);
    m.def("valid_contingency", &valid_contingency, py::arg("database"), py::arg("query"), py::arg("gamma"));

    py::class_<ConditionResult>(m, "Condition")
        .def_readonly("ok", &ConditionResult::ok)
        .def_readonly("evidence", &ConditionResult::evidence);
    py::class_<IJPReport>(m, "IJPReport")
        .def_property_readonly("passed", &IJPReport::pass)
        .def_property_readonly("conditions",
                               [](const IJPReport& r) {
                                   return std::vector<ConditionResult>{r.c1, r.c2, r.c3, r.c4, r.c5};
                               })
        .def_property_readonly("rho",
                               [](const IJPReport& r) {
                                   return py::make_tuple(r.rho, r.rho_minus_a, r.rho_minus_b, r.rho_minus_ab);
                               })
        .def_readonly("closure_added", &IJPReport::closure_added)
        .def_readonly("closed", &IJPReport::closed);
    m.def(
        "check_ijp",
        [](const Database& d, const Query& q, const std::string& rel, std::vector<std::string> a,
           std::vector<std::string> b) { return check_ijp({d, q, rel, std::move(a), std::move(b)}); },
        py::arg("database"), py::arg("query"), py::arg("relation"), py::arg("a"), py::arg("b"));
    m.def(
        "ijp_search",
        [](const Query& q, int max_joins, std::uint64_t budget, bool first) {
            auto res = ijp_search(q, {max_joins, budget, first});
            py::list found;
            for (const auto& f : res.found) {
                py::dict e;
                e["joins"] = f.joins;
                e["database"] = f.candidate.database;
                e["relation"] = f.candidate.relation;
                e["a"] = f.candidate.tuple_a;
                e["b"] = f.candidate.tuple_b;
                e["partition"] = f.partition;
                found.append(e);
            }
            py::dict out;
            out["found"] = found;
            out["complete"] = res.complete;
            out["partitions_per_join"] = res.partitions_per_join;
            out["candidates_checked"] = res.candidates_checked;
            return out;
        },
        py::arg("query"), py::arg("max_joins") = 3, py::arg("budget") = 1000000, py::arg("first") = false);
    m.def("bell_number", &bell_number);

    py::class_<CNF>(m, "CNF")
        .def(py::init([](const std::string& dimacs) { return parse_dimacs(dimacs); }), py::arg("dimacs"))
        .def_readonly("n", &CNF::n)
        .def_property_readonly("m", &CNF::m)
        .def("__str__", &format_cnf)
        .def("to_dimacs", &to_dimacs);
    m.def("brute_force_sat", &brute_force_sat);
    m.def("brute_force_maxsat", &brute_force_maxsat);

    py::class_<ReductionInstance>(m, "ReductionInstance")
        .def_readonly("generator", &ReductionInstance::generator)
        .def_readonly("query", &ReductionInstance::query)
        .def_readonly("database", &ReductionInstance::database)
        .def_readonly("k", &ReductionInstance::k)
        .def_readonly("claim_text", &ReductionInstance::claim_text)
        .def_readonly("params", &ReductionInstance::params)
        .def(
            "verify",
            [](const ReductionInstance& inst, int max_vars, std::size_t max_facts) {
                return verify_dict(verify_reduction(inst, {max_vars, max_facts}));
            },
            py::arg("max_vars") = 8, py::arg("max_facts") = 400);

    m.def("gen_vc", [](const std::string& graph) { return gen_vc_instance(parse_graph(graph)); });
    m.def(
        "gen_path",
        [](const std::string& graph, const Query& q) {
            return gen_path_reduction(gen_vc_instance(parse_graph(graph)).database, q);
        },
        py::arg("graph"), py::arg("query"));
    m.def("gen_chain", &gen_chain_3sat);
    m.def("gen_chain_unary", &gen_chain_unary_3sat, py::arg("formula"), py::arg("variant"));
    m.def("gen_triangle", &gen_triangle_3sat);
    m.def("gen_permAB", &gen_permAB_3sat);
    m.def("gen_3confAC", &gen_3confAC_max2sat, py::arg("formula"), py::arg("r"));
    m.def("chain_unary_variants", &chain_unary_variants);
}
