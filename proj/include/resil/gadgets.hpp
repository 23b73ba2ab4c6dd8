#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "resil/database.hpp"
#include "resil/query.hpp"

namespace resil {

struct Literal {
    int var = 0;  // 0-based
    bool positive = true;

    bool operator==(const Literal&) const = default;
    auto operator<=>(const Literal&) const = default;
};

struct CNF {
    int n = 0;
    std::vector<std::vector<Literal>> clauses;

    int m() const { return static_cast<int>(clauses.size()); }
    bool operator==(const CNF&) const = default;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// DIMACS: optional "c" comment lines, "p cnf n m", clauses terminated by 0.
CNF parse_dimacs(const std::string& text);
std::string to_dimacs(const CNF& f);
std::string format_cnf(const CNF& f);  // e.g. (v1 | v1 | !v2) & (...)

bool brute_force_sat(const CNF& f);
int brute_force_maxsat(const CNF& f);  // most clauses satisfied by one assignment

struct Graph {
    std::vector<std::string> nodes;
    std::vector<std::pair<std::string, std::string>> edges;  // directed
};

// One edge "u v" per line; "#" comments; a lone name declares an isolated node.
Graph parse_graph(const std::string& text);

struct ReductionInstance {
    enum class Claim {
        SatIffAtMostK,     // formula satisfiable <=> rho <= k (and rho == k when satisfiable)
        MaxSatIffAtMostK,  // at least r clauses satisfiable <=> rho <= k
        EqualsSource,      // rho equals the source resilience (vc reductions)
    };

    std::string generator;
    Query query;
    Database database;
    int k = 0;
    Claim claim = Claim::SatIffAtMostK;
    std::string claim_text;
    std::optional<CNF> formula;
    int r = -1;                   // Max2SAT target
    int source_resilience = -1;   // EqualsSource: resilience of the source instance
    std::map<std::string, std::string> params;
};

ReductionInstance gen_vc_instance(const Graph& g);

// Maps a vc database (R unary, S binary) into a database for q along the path the classifier detects.
ReductionInstance gen_path_reduction(const Database& d_vc, const Query& q);

ReductionInstance gen_chain_3sat(const CNF& f);
// variant in {a, b, c, ab, bc, ac, abc}
ReductionInstance gen_chain_unary_3sat(const CNF& f, const std::string& variant);
ReductionInstance gen_triangle_3sat(const CNF& f);
ReductionInstance gen_permAB_3sat(const CNF& f);
ReductionInstance gen_3confAC_max2sat(const CNF& f, int r);

const std::vector<std::string>& chain_unary_variants();
Query chain_unary_query(const std::string& variant);

// Affine fit k = alpha*n*m + beta*m + gamma*n + delta of the oracle resilience
// of satisfiable chain instances over a grid of tiny sizes.
struct ChainCalibration {
    long alpha = 0, beta = 0, gamma = 0, delta = 0;
    bool consistent = false;       // every sample fits and satisfiable sizes agree
    bool discriminates = false;    // every unsatisfiable sample exceeds the fit
    std::string matches;           // "(n+5)m", "(2n+5)m" or "neither"
    std::vector<std::string> log;  // one line per size
    long k(int n, int m) const { return alpha * n * m + beta * m + gamma * n + delta; }
};

// Computed once per process and cached.
const ChainCalibration& chain_calibration();
ChainCalibration calibrate_chain(const std::vector<std::pair<int, int>>& sizes, int samples_per_size);

struct VerifyOptions {
    int max_vars = 8;
    std::size_t max_facts = 400;
};

struct VerifyResult {
    enum class Verdict { Match, Mismatch, Unverified };
    Verdict verdict = Verdict::Unverified;
    int rho = -1;
    int k = 0;
    bool satisfiable = false;
    int maxsat = -1;
    bool rho_equals_k = false;  // the sharper equality for satisfiable 3SAT instances
    std::string detail;
};

std::string to_string(VerifyResult::Verdict v);

VerifyResult verify_reduction(const ReductionInstance& inst, const VerifyOptions& opt = {});

// Clause lists over all n variables (each variable used), one representative
// per orbit under variable renaming and polarity flips. Clause literal order
// is significant for the gadgets, so it is kept.
std::vector<CNF> enumerate_3cnf(int n, int m);
// Clauses of size 1 or 2.
std::vector<CNF> enumerate_2cnf(int n, int m);

}  // namespace resil
