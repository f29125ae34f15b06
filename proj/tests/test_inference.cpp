#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "pnm/cluster_graph.hpp"
#include "pnm/inference.hpp"
#include "pnm/oracle.hpp"

using namespace pnm;

namespace {

SparseFactor diff_factor(VariableId a, VariableId b,
                         const std::vector<Value>& dom) {
    std::vector<std::vector<Value>> rows;
    for (Value x : dom) {
        for (Value y : dom) {
            if (x != y) rows.push_back({x, y});
        }
    }
    return SparseFactor::from_rows({a, b}, rows);
}

std::set<std::vector<Value>> support_of(const SparseFactor& f) {
    std::set<std::vector<Value>> rows;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto r = f.row(i);
        rows.insert(std::vector<Value>(r.begin(), r.end()));
    }
    return rows;
}

}  // namespace

TEST_CASE("single message prunes the receiver's support") {
    // A != B, B != C over {1,2} with A observed as 1. Cluster 0 knows only
    // (2, ...) rows survive for B; the message tells cluster 1.
    DomainTable domains({{1, 2}, {1, 2}, {1, 2}});
    SparseFactor f0 = observe(diff_factor(0, 1, {1, 2}), {{0, 1}});
    // f0 is now over {B} alone: B = 2.
    SparseFactor f1 = diff_factor(1, 2, {1, 2});
    ClusterGraph g({f0, f1}, {{0, 1, {1}}});
    SepsetState sep = SepsetState::fresh(g);

    MessageOutcome out = pass_message(g, sep, 0, true, domains);
    CHECK(out.belief_changed);
    CHECK(out.deviation > 0);
    CHECK(support_of(g.factor(1)) ==
          std::set<std::vector<Value>>{{2, 1}});

    SUBCASE("the reverse message is then a no-op") {
        MessageOutcome back = pass_message(g, sep, 0, false, domains);
        CHECK(back.deviation == 0);
        CHECK_FALSE(back.belief_changed);
    }
    SUBCASE("emptying the receiver raises unsatisfiable") {
        // Contradictory second cluster: B must equal 1, but message says 2.
        SparseFactor f2 = SparseFactor::from_rows({1, 2}, {{1, 2}});
        ClusterGraph g2({f0, f2}, {{0, 1, {1}}});
        SepsetState s2 = SepsetState::fresh(g2);
        CHECK_THROWS_AS(pass_message(g2, s2, 0, true, domains),
                        UnsatisfiableError);
    }
}

TEST_CASE("propagation calibrates a chain to the exact marginals") {
    // A != B, B != C over {1,2}, A = 1: unique solution (1, 2, 1).
    DomainTable domains({{1, 2}, {1, 2}, {1, 2}});
    SparseFactor f0 = observe(diff_factor(0, 1, {1, 2}), {{0, 1}});
    SparseFactor f1 = diff_factor(1, 2, {1, 2});
    ClusterGraph g({f0, f1}, {{0, 1, {1}}});

    PropagateOptions opt;
    opt.domains = &domains;
    PropagateResult res = propagate(g, opt);

    CHECK(res.messages >= 2);
    CHECK(res.support_removed > 0);
    CHECK(support_of(g.factor(0)) == std::set<std::vector<Value>>{{2}});
    CHECK(support_of(g.factor(1)) == std::set<std::vector<Value>>{{2, 1}});
}

TEST_CASE("calibrated tree clusters agree with the oracle's projections") {
    // Random tree-shaped pairwise instances: the calibrated cluster support
    // must equal the projection of the full solution set.
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + int(rng() % 4);  // chain over n variables
        std::vector<Value> dom;
        for (Value x = 1; x <= Value(2 + rng() % 2); ++x) dom.push_back(x);

        CspInstance inst;
        std::vector<std::vector<Value>> doms;
        for (int v = 0; v < n; ++v) {
            inst.names.push_back("v" + std::to_string(v));
            doms.push_back(dom);
        }
        inst.domains = DomainTable(doms);
        std::vector<SparseFactor> clusters;
        for (int v = 0; v + 1 < n; ++v) {
            inst.clauses.push_back(
                {{VariableId(v), VariableId(v + 1)}, AllDiffClause{}});
            clusters.push_back(
                diff_factor(VariableId(v), VariableId(v + 1), dom));
        }
        // Pin one variable at random through an extra unary restriction.
        VariableId pinned = VariableId(rng() % n);
        Value pin = dom[rng() % dom.size()];
        inst.evidence = {{pinned, pin}};
        for (auto& c : clusters) {
            if (c.scope_contains(pinned)) {
                c = restrict_variable(c, pinned, {pin});
            }
        }

        ClusterGraph g = ltrip(std::move(clusters));
        REQUIRE(is_tree(g));
        PropagateOptions opt;
        opt.domains = &inst.domains;
        propagate(g, opt);

        OracleResult oracle = brute_force_solutions(inst);
        REQUIRE(!oracle.solutions.empty());
        for (std::size_t ci = 0; ci < g.size(); ++ci) {
            const auto& scope = g.factor(ci).scope();
            std::set<std::vector<Value>> expect;
            for (const auto& s : oracle.solutions) {
                std::vector<Value> row;
                for (VariableId v : scope) row.push_back(s[v]);
                expect.insert(std::move(row));
            }
            CAPTURE(trial);
            CAPTURE(ci);
            CHECK(support_of(g.factor(ci)) == expect);
        }
    }
}

TEST_CASE("loopy propagation converges and never grows support") {
    // Triangle of pairwise differences: loopy but convergent.
    DomainTable domains({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
    std::vector<Value> dom{1, 2, 3};
    std::vector<SparseFactor> clusters{diff_factor(0, 1, dom),
                                       diff_factor(1, 2, dom),
                                       diff_factor(0, 2, dom)};
    std::vector<std::size_t> before;
    for (const auto& c : clusters) before.push_back(c.size());

    ClusterGraph g = ltrip(std::move(clusters));
    REQUIRE_FALSE(is_tree(g));

    PropagateOptions opt;
    opt.domains = &domains;
    std::uint64_t events = 0;
    opt.on_message = [&](const MessageEvent&) { ++events; };
    PropagateResult res = propagate(g, opt);

    CHECK(res.messages == events);
    CHECK(res.messages > 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(g.factor(i).size() <= before[i]);
    }
}

TEST_CASE("message budget aborts runaway schedules") {
    DomainTable domains({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
    std::vector<Value> dom{1, 2, 3};
    ClusterGraph g = ltrip({diff_factor(0, 1, dom), diff_factor(1, 2, dom),
                            diff_factor(0, 2, dom)});
    PropagateOptions opt;
    opt.domains = &domains;
    opt.max_messages = 1;
    CHECK_THROWS_AS(propagate(g, opt), MessageBudgetError);
}

TEST_CASE("propagation requires the domain table") {
    DomainTable domains({{1, 2}, {1, 2}});
    ClusterGraph g({SparseFactor::from_rows({0, 1}, {{1, 2}})}, {});
    PropagateOptions opt;  // domains left unset
    CHECK_THROWS_AS(propagate(g, opt), std::logic_error);
}
