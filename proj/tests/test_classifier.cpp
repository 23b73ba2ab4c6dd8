#include <doctest.h>

#include "resil/classifier.hpp"
#include "support.hpp"

using namespace resil;

namespace {
Query Q(const std::string& s) { return parse_query(s); }

bool has_kind(const Classification& c, FindingKind k) {
    for (const auto& f : c.findings)
        if (f.kind == k) return true;
    for (const auto& s : c.components)
        if (has_kind(s, k)) return true;
    return false;
}
}  // namespace

TEST_SUITE("dichotomy-classifier") {
    TEST_CASE("fixture verdicts") {
        auto fx = testing::load_fixture_queries();
        REQUIRE(fx.size() >= 40);
        for (const auto& f : fx) {
            CAPTURE(f.name);
            auto c = classify(Q(f.text));
            CHECK(to_string(c.verdict) == f.verdict);
            if (c.verdict == Verdict::PTIME) CHECK_FALSE(c.solver_plan.empty());
            if (c.verdict == Verdict::NP_COMPLETE) CHECK_FALSE(c.findings.empty());
        }
    }

    TEST_CASE("detect_path") {
        auto u = detect_path(Q("q :- R(x), S(x,y), R(y)"));
        REQUIRE(u);
        CHECK(u->kind == FindingKind::UNARY_PATH);
        auto b = detect_path(Q("q :- R(x,x), S(x,y), R(y,y)"));
        REQUIRE(b);
        CHECK(b->kind == FindingKind::BINARY_PATH);
        CHECK_FALSE(detect_path(Q("q :- R(x,y), R(y,z)")));
    }

    TEST_CASE("2R patterns") {
        CHECK(detect_2R_pattern(Q("q :- R(x,y), R(y,z)")).kind == FindingKind::CHAIN);
        CHECK(detect_2R_pattern(Q("q :- R(x,y), R(z,y)")).kind == FindingKind::CONFLUENCE);
        CHECK(detect_2R_pattern(Q("q :- R(x,y), R(y,x)")).kind == FindingKind::PERMUTATION);
        CHECK(detect_2R_pattern(Q("q :- R(x,x), R(x,y), A(y)")).kind == FindingKind::REP);
        CHECK_THROWS_AS(detect_2R_pattern(Q("q :- R(x,y), R(y,z), R(z,w)")), QueryError);
    }

    TEST_CASE("bounded permutation") {
        CHECK(is_bounded_permutation(Q("q :- A(x), R(x,y), R(y,x), B(y)")));
        CHECK_FALSE(is_bounded_permutation(Q("q :- A(x), R(x,y), R(y,x)")));
        CHECK_FALSE(is_bounded_permutation(Q("q :- R(x,y), R(y,x)")));
    }

    TEST_CASE("confluence exogenous path") {
        CHECK(has_confluence_exogenous_path(Q("q :- R(x,y), H^x(x,z), R(z,y)")));
        CHECK_FALSE(has_confluence_exogenous_path(Q("q :- A(x), R(x,y), R(z,y), C(z)")));
        CHECK_FALSE(has_confluence_exogenous_path(Q("q :- R(x,y), R(z,y), W^x(x,y,z)")));
    }

    TEST_CASE("classify examples") {
        auto t = classify(Q("q :- R(x,y), S(y,z), T(z,x)"));
        CHECK(t.verdict == Verdict::NP_COMPLETE);
        CHECK(has_kind(t, FindingKind::TRIAD));

        auto r = classify(Q("q :- R(x,y), A(x), T(z,x), S(y,z)"));
        CHECK(r.verdict == Verdict::PTIME);
        CHECK(r.solver_plan == "standard-flow");

        CHECK(classify(Q("q :- A(x), R(x,y), R(z,y), R(z,w), S^x(z,w)")).verdict == Verdict::OPEN);

        auto p = classify(Q("q :- A(x), R(x,y), R(y,x), B(y)"));
        CHECK(p.verdict == Verdict::NP_COMPLETE);
        CHECK(has_kind(p, FindingKind::BOUNDED_PERMUTATION));

        auto c = classify(Q("q :- R(x,y), R(y,z)"));
        CHECK(has_kind(c, FindingKind::CHAIN));

        CHECK(classify(Q("q :- A(x), R(x,y), R(z,y), C(z)")).solver_plan == "conf-flow");
        CHECK(classify(Q("q :- R(x,x), R(x,y), A(y)")).solver_plan == "rep-z3-flow");
        CHECK(classify(Q("q :- R(x,y), R(y,x)")).solver_plan == "perm-count");
        CHECK(classify(Q("q :- A(x), R(x,y), R(y,x)")).solver_plan == "bipartite-vc");
    }

    TEST_CASE("disconnected queries combine component verdicts") {
        auto c = classify(Q("q :- A(x), R(x,y), R(z,w), B(w)"));
        CHECK(c.verdict == Verdict::PTIME);
        CHECK(c.components.size() == 2);
        auto h = classify(Q("q :- R(x,y), S(y,z), T(z,x), U(w)"));
        CHECK(h.verdict == Verdict::NP_COMPLETE);
    }

    TEST_CASE("non-minimal input is minimized first") {
        auto c = classify(Q("q :- R(x,y), R(z,y), R(z,w), R(x,w)"));
        CHECK(c.verdict == Verdict::PTIME);
        CHECK(c.minimized_query.size() == 1);
    }

    TEST_CASE("unsupported beyond the covered fragment") {
        CHECK(classify(Q("q :- R(x,y), R(y,z), S(z,w), S(w,u)")).verdict == Verdict::UNSUPPORTED);
    }

    TEST_CASE("catalog") {
        const auto& cat = catalog();
        CHECK(cat.size() == 23);
        std::set<std::string> keys;
        for (const auto& e : cat) {
            CAPTURE(e.name);
            CHECK(keys.insert(e.key).second);
            CHECK(catalog_lookup(normalize(minimize(e.query))) == &e);
            CHECK(classify(e.query).verdict == e.verdict);
            CHECK_FALSE(e.citation.empty());
            if (e.verdict == Verdict::PTIME) CHECK_FALSE(e.plan.empty());
        }
        CHECK_THROWS(parse_catalog("broken line without fields\n"));
    }

    TEST_CASE("verdict strings") {
        for (auto v : {Verdict::PTIME, Verdict::NP_COMPLETE, Verdict::OPEN, Verdict::UNSUPPORTED})
            CHECK(parse_verdict(to_string(v)) == v);
        CHECK_FALSE(parse_verdict("maybe"));
    }
}
