#include <doctest.h>

#include "resil/ijp.hpp"
#include "resil/solvers.hpp"
#include "support.hpp"

using namespace resil;

namespace {
Query Q(const std::string& s) { return parse_query(s); }
Database D(const std::string& s) { return load_database(s); }

std::vector<Fact> F(std::initializer_list<const char*> fs) {
    std::vector<Fact> out;
    for (auto f : fs) out.push_back(parse_fact(f));
    return out;
}

const char* kZ5 =
    "A(1)\nA(4)\nA(5)\nA(9)\nA(13)\nR(1,2)\nR(2,2)\nR(2,3)\nR(3,3)\nR(4,1)\nR(5,2)\n"
    "R(5,6)\nR(6,7)\nR(7,7)\nR(8,7)\nR(9,8)\nR(1,10)\nR(10,11)\nR(11,11)\nR(12,11)\nR(13,12)\n";
const char* kTriangle = "R(1,2)\nR(4,2)\nR(4,5)\nS(2,3)\nS(5,3)\nT(3,1)\nT(3,4)\n";
}  // namespace

TEST_SUITE("ijp-lab") {
    TEST_CASE("vc example passes") {
        auto r = check_ijp({D("R(1)\nS(1,2)\nR(2)\n"), Q("q :- R(x), S(x,y), R(y)"), "R", {"1"}, {"2"}});
        CHECK(r.pass());
        CHECK(r.rho == 1);
        CHECK(r.rho_minus_a == 0);
        CHECK(r.rho_minus_b == 0);
        CHECK(r.rho_minus_ab == 0);
        CHECK(r.closure_added.empty());
    }

    TEST_CASE("triangle example passes") {
        auto r = check_ijp({D(kTriangle), Q("q :- R(x,y), S(y,z), T(z,x)"), "R", {"1", "2"}, {"4", "5"}});
        CHECK(r.pass());
        CHECK(r.rho == 2);
        CHECK(r.rho_minus_a == 1);
        CHECK(r.rho_minus_b == 1);
        CHECK(r.rho_minus_ab == 1);
        CHECK(r.witnesses_with_a == 1);
        CHECK(r.witnesses_with_b == 1);
    }

    TEST_CASE("z5 example: resilience table from two routes") {
        auto q = Q("q :- A(x), R(x,y), R(y,z), R(z,z)");
        auto d = D(kZ5);
        auto r = check_ijp({d, q, "A", {"9"}, {"13"}});
        CHECK(r.c1.ok);
        CHECK(r.c2.ok);
        CHECK(r.c4.ok);
        auto a = parse_fact("A(9)"), b = parse_fact("A(13)");
        CHECK(r.rho == *testing::brute_force_resilience(d, q));
        CHECK(r.rho_minus_a == *testing::brute_force_resilience(d.without({a}), q));
        CHECK(r.rho_minus_b == *testing::brute_force_resilience(d.without({b}), q));
        CHECK(r.rho_minus_ab == *testing::brute_force_resilience(d.without({a, b}), q));
        CHECK(r.rho == 4);
        CHECK(r.rho_minus_a == 3);
        CHECK(r.rho_minus_b == 4);
        CHECK(r.rho_minus_ab == 3);
        CHECK_FALSE(r.c5.ok);
        // The printed contingency sets, checked one by one. Two of them leave
        // the witness (5,2,3) intact.
        CHECK_FALSE(valid_contingency(d, q, F({"R(1,2)", "R(2,2)", "R(7,7)", "R(11,11)"})));
        CHECK(satisfies(d.without(F({"R(1,2)", "R(2,2)", "R(7,7)", "R(11,11)"})), q));
        CHECK(valid_contingency(d.without({a}), q, F({"A(5)", "R(1,2)", "R(11,11)"})));
        CHECK_FALSE(valid_contingency(d.without({b}), q, F({"A(1)", "R(2,2)", "R(7,7)"})));
        CHECK(valid_contingency(d.without({a, b}), q, F({"A(1)", "A(5)", "R(1,2)"})));
        CHECK(valid_contingency(d.without({a, b}), q, F({"A(1)", "A(5)", "R(2,2)"})));
    }

    TEST_CASE("independent paths example fails after closure") {
        IJPCandidate c{D("A(1)\nR(1)\nS(1,2)\nS(3,2)\nR(3)\nB(3)\n"),
                       Q("q :- A^x(x), R(x), S(x,y), S(z,y), R(z), B^x(z)"), "R", {"1"}, {"3"}};
        auto closed = closure_condition4(c);
        CHECK(closed.contains(parse_fact("B(1)")));
        CHECK(closed.contains(parse_fact("A(3)")));
        auto r = check_ijp(c);
        CHECK_FALSE(r.pass());
        CHECK_FALSE(r.c4.ok);
        CHECK(r.closure_added == F({"A(3)", "B(1)"}));
        CHECK_FALSE(r.c5.ok);
    }

    TEST_CASE("pair conditions") {
        auto q = Q("q :- R(x), S(x,y), R(y)");
        CHECK_FALSE(check_ijp({D("R(1)\nS(1,1)\n"), q, "R", {"1"}, {"1"}}).c1.ok);
        CHECK_FALSE(check_ijp({D("R(1)\nS(1,2)\nR(2)\n"), q, "R", {"1"}, {"7"}}).c1.ok);
    }

    TEST_CASE("closure is idempotent") {
        IJPCandidate c{D("A(1)\nR(1)\nS(1,2)\nS(3,2)\nR(3)\nB(3)\n"),
                       Q("q :- A^x(x), R(x), S(x,y), S(z,y), R(z), B^x(z)"), "R", {"1"}, {"3"}};
        auto once = closure_condition4(c);
        IJPCandidate again = c;
        again.database = once;
        CHECK(closure_condition4(again) == once);
    }

    TEST_CASE("set partitions: count, growth rule and order") {
        // Bell numbers from the Bell triangle against the restricted growth enumeration.
        const std::uint64_t known[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147};
        for (int n = 0; n <= 9; ++n) {
            std::vector<int> prev;
            bool ok = true;
            auto count = enumerate_partitions(n, [&](const std::vector<int>& rgs) {
                int mx = -1;
                for (int x : rgs) {
                    if (x > mx + 1) ok = false;
                    mx = std::max(mx, x);
                }
                if (!prev.empty() && !(prev < rgs)) ok = false;
                prev = rgs;
                return true;
            });
            CHECK(ok);
            CHECK(count == known[n]);
            CHECK(bell_number(n) == known[n]);
        }
        int seen = 0;
        CHECK(enumerate_partitions(5, [&](const std::vector<int>&) { return ++seen < 3; }) == 3);
    }

    TEST_CASE("canonical witnesses") {
        auto d = canonical_witnesses(Q("q :- R(x,y), S(y,z), T(z,x)"), 3);
        CHECK(d.size() == 9);
        CHECK(d.constants().size() == 9);
        CHECK(d.contains(parse_fact("R(x1,y1)")));
        CHECK(d.contains(parse_fact("T(z3,x3)")));
    }

    TEST_CASE("isomorphism") {
        auto q = Q("q :- R(x,y), S(y,z), T(z,x)");
        auto a = D(kTriangle);
        auto b = D("R(a,b)\nR(d,b)\nR(d,e)\nS(b,c)\nS(e,c)\nT(c,a)\nT(c,d)\n");
        CHECK(databases_isomorphic(a, b));
        CHECK(candidates_isomorphic({a, q, "R", {"1", "2"}, {"4", "5"}}, {b, q, "R", {"d", "e"}, {"a", "b"}}));
        CHECK_FALSE(candidates_isomorphic({a, q, "R", {"1", "2"}, {"4", "5"}}, {b, q, "R", {"d", "b"}, {"a", "b"}}));
        CHECK_FALSE(databases_isomorphic(a, D("R(1,2)\n")));
    }

    TEST_CASE("search on small queries") {
        auto vc = ijp_search(Q("q :- R(x), S(x,y), R(y)"), {1});
        CHECK(vc.complete);
        CHECK(vc.found.size() == 1);
        CHECK(vc.found.front().report.pass());
        CHECK(ijp_search(Q("q :- R(x,y)"), {2}).found.empty());
        IJPSearchOptions tight;
        tight.max_joins = 3;
        tight.budget = 10;
        auto cut = ijp_search(Q("q :- R(x,y), S(y,z), T(z,x)"), tight);
        CHECK_FALSE(cut.complete);
    }

    TEST_CASE("everything the search returns passes the strict check") {
        auto res = ijp_search(Q("q :- A(x), R(x,y), R(y,x)"), {2});
        for (const auto& f : res.found) {
            auto r = check_ijp(f.candidate);
            CHECK(r.pass());
        }
        for (std::size_t i = 0; i < res.found.size(); ++i)
            for (std::size_t j = i + 1; j < res.found.size(); ++j)
                CHECK_FALSE(candidates_isomorphic(res.found[i].candidate, res.found[j].candidate));
    }
}
