#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "resil/analysis.hpp"
#include "resil/database.hpp"
#include "resil/flow.hpp"
#include "resil/query.hpp"

namespace resil {

class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ResilienceResult {
    enum class Status { Ok, Infeasible };

    Status status = Status::Ok;
    int k = 0;
    std::vector<Fact> gamma;  // sorted
    std::string method;
    std::size_t witness_count = 0;
    long long cut_value = -1;       // flow solvers only
    bool cut_had_duplicates = false;  // some tuple was cut through two edges
    std::vector<std::string> notes;
    double millis = 0;

    // Classification context, filled by solve().
    std::string verdict;

    bool feasible() const { return status == Status::Ok; }
};

ResilienceResult resilience_exact(const Database& d, const Query& q);

// Exact min-cut over a linear arrangement of a self-join-free query. The order
// is a permutation of atom indices; an empty order means "search for one".
ResilienceResult resilience_flow_linear(const Database& d, const Query& q,
                                        const std::vector<std::size_t>& order = {});

// Standard flow for sj-free queries after merging exogenous atoms into joins
// where needed to reach a linear arrangement.
ResilienceResult resilience_standard_flow(const Database& d, const Query& q);

ResilienceResult resilience_2conf(const Database& d, const Query& q);
// Bipartite variant for the exact q_conf^AC shape: R treated as exogenous.
ResilienceResult resilience_conf_ac_bipartite(const Database& d, const Query& q);

ResilienceResult resilience_perm_unbounded(const Database& d, const Query& q);
ResilienceResult resilience_rep_z3(const Database& d, const Query& q);

// These accept any query isomorphic to the named shape; the overloads taking
// only a database assume the shape's own relation names.
ResilienceResult resilience_3perm_A(const Database& d, const Query& q);
ResilienceResult resilience_3perm_A(const Database& d);
ResilienceResult resilience_3perm_Swx(const Database& d, const Query& q);
ResilienceResult resilience_3perm_Swx(const Database& d);
ResilienceResult resilience_3conf_TS(const Database& d, const Query& q);
ResilienceResult resilience_3conf_TS(const Database& d);

// Dispatch by solver plan name (the classifier's vocabulary plus "exact").
ResilienceResult run_method(const std::string& method, const Database& d, const Query& q);
std::vector<std::string> method_names();

// Classifies q and dispatches; NPC / OPEN / UNSUPPORTED fall back to exact.
ResilienceResult solve(const Database& d, const Query& q);

// Does removing gamma leave no witness? Also checks gamma is endogenous.
bool valid_contingency(const Database& d, const Query& q, const std::vector<Fact>& gamma);

namespace shapes {
const Query& q_perm();
const Query& q_perm_A();
const Query& q_conf_AC();
const Query& q_3perm_A();
const Query& q_3perm_Swx();
const Query& q_3conf_TS();
}  // namespace shapes

}  // namespace resil
