#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "pnm/cluster_graph.hpp"
#include "pnm/factor.hpp"

using namespace pnm;

namespace {

// All-ones factor over the scope with binary domains; entry counts differ
// per width so clusters stay distinguishable in dumps.
SparseFactor stub_factor(std::vector<VariableId> scope) {
    DomainTable domains(
        std::vector<std::vector<Value>>(32, std::vector<Value>{1, 2}));
    return SparseFactor::full_support(std::move(scope), domains);
}

std::vector<SparseFactor> stub_factors(
    std::vector<std::vector<VariableId>> scopes) {
    std::vector<SparseFactor> out;
    for (auto& s : scopes) out.push_back(stub_factor(std::move(s)));
    return out;
}

// Random scope collection with no subsumed pair, the ltrip precondition.
std::vector<SparseFactor> random_collection(std::mt19937& rng) {
    const int pool = 4 + int(rng() % 8);
    const int want = 2 + int(rng() % 6);
    std::vector<std::vector<VariableId>> scopes;
    for (int attempts = 0; attempts < 200 && int(scopes.size()) < want;
         ++attempts) {
        std::vector<VariableId> s;
        for (VariableId v = 0; v < VariableId(pool); ++v) {
            if (rng() % 3 == 0) s.push_back(v);
        }
        if (s.empty() || s.size() > 5) continue;
        bool related = false;
        for (const auto& t : scopes) {
            if (scope_subset(s, t) || scope_subset(t, s)) {
                related = true;
                break;
            }
        }
        if (!related) scopes.push_back(std::move(s));
    }
    return stub_factors(std::move(scopes));
}

}  // namespace

TEST_CASE("three-cluster chain gets the expected sepsets") {
    ClusterGraph g = ltrip(stub_factors({{0, 1, 2}, {1, 2, 3}, {2, 3, 4}}));
    REQUIRE(g.size() == 3);
    REQUIRE(g.edges().size() == 2);

    // Chain with sepsets {1,2} and {2,3}: variable 2 lives in all three
    // clusters, and its spanning tree threads through the overlap-2 edges.
    const auto& e0 = g.edges()[0];
    const auto& e1 = g.edges()[1];
    CHECK(e0.a == 0);
    CHECK(e0.b == 1);
    CHECK(e0.sepset == std::vector<VariableId>{1, 2});
    CHECK(e1.a == 1);
    CHECK(e1.b == 2);
    CHECK(e1.sepset == std::vector<VariableId>{2, 3});

    CHECK(validate_rip(g).ok());
    CHECK(is_tree(g));
}

TEST_CASE("disconnected scope groups stay disconnected") {
    ClusterGraph g = ltrip(stub_factors({{0, 1}, {1, 2}, {5, 6}, {6, 7}}));
    CHECK(g.edges().size() == 2);
    CHECK(is_tree(g));
    CHECK(validate_rip(g).ok());
    for (const auto& e : g.edges()) {
        bool first = e.a == 0 && e.b == 1;
        bool second = e.a == 2 && e.b == 3;
        CHECK((first || second));
    }
}

TEST_CASE("shared variable across many clusters forms one spanning tree") {
    // Four clusters all holding variable 0; pairwise overlaps are just {0},
    // so its tree has exactly three edges and no cycle.
    ClusterGraph g =
        ltrip(stub_factors({{0, 1}, {0, 2}, {0, 3}, {0, 4}}));
    CHECK(g.edges().size() == 3);
    for (const auto& e : g.edges()) {
        CHECK(e.sepset == std::vector<VariableId>{0});
    }
    CHECK(validate_rip(g).ok());
    CHECK(is_tree(g));
}

TEST_CASE("loopy graphs are recognised as non-trees") {
    // Pairwise overlapping triangle: RIP needs a cycle here.
    ClusterGraph g = ltrip(stub_factors({{0, 1}, {1, 2}, {0, 2}}));
    CHECK(validate_rip(g).ok());
    CHECK_FALSE(is_tree(g));
}

TEST_CASE("constructor validates edges against clusters") {
    auto fs = stub_factors({{0, 1}, {1, 2}});

    SUBCASE("valid edge passes") {
        auto copy = fs;
        CHECK_NOTHROW(ClusterGraph(std::move(copy), {{0, 1, {1}}}));
    }
    SUBCASE("sepset must be contained in both scopes") {
        auto copy = fs;
        CHECK_THROWS_AS(ClusterGraph(std::move(copy), {{0, 1, {0}}}),
                        std::logic_error);
    }
    SUBCASE("endpoints must be ordered and distinct") {
        auto copy = fs;
        CHECK_THROWS_AS(ClusterGraph(std::move(copy), {{1, 0, {1}}}),
                        std::logic_error);
    }
    SUBCASE("incident lists mirror the edges") {
        ClusterGraph g(std::move(fs), {{0, 1, {1}}});
        REQUIRE(g.incident(0).size() == 1);
        CHECK(g.incident(0)[0] == 0);
        CHECK(g.incident(1) == g.incident(0));
    }
}

TEST_CASE("ltrip rejects subsumed scopes") {
    CHECK_THROWS_AS(ltrip(stub_factors({{0, 1, 2}, {0, 1}})),
                    std::logic_error);
}

TEST_CASE("random collections always satisfy RIP") {
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 300; ++trial) {
        auto fs = random_collection(rng);
        if (fs.size() < 2) continue;
        ClusterGraph g = ltrip(std::move(fs));
        RipReport rep = validate_rip(g);
        CAPTURE(trial);
        CHECK(rep.ok());
    }
}

TEST_CASE("dump lists clusters with scopes and sepsets") {
    ClusterGraph g = ltrip(stub_factors({{0, 1}, {1, 2}}));
    std::string text =
        dump_graph(g, [](VariableId v) { return "x" + std::to_string(v); });
    CHECK(text.find("x0") != std::string::npos);
    CHECK(text.find("x1") != std::string::npos);
    CHECK(text.find("x2") != std::string::npos);
}
