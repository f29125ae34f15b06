#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "pnm/factor.hpp"
#include "pnm/purge.hpp"

using namespace pnm;

namespace {

std::set<std::vector<Value>> support_of(const SparseFactor& f) {
    std::set<std::vector<Value>> rows;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto r = f.row(i);
        rows.insert(std::vector<Value>(r.begin(), r.end()));
    }
    return rows;
}

// Joint support over `ids` implied by the factor list: assignments over the
// union scope consistent with every factor. Brute force, for cross-checks.
std::set<std::vector<Value>> joint_support(
    const std::vector<SparseFactor>& factors, const DomainTable& domains,
    const std::vector<VariableId>& ids) {
    std::set<std::vector<Value>> out;
    std::vector<Value> a(ids.size());
    auto rec = [&](auto&& self, std::size_t k) -> void {
        if (k == ids.size()) {
            for (const auto& f : factors) {
                std::vector<Value> row;
                for (VariableId v : f.scope()) {
                    auto it = std::find(ids.begin(), ids.end(), v);
                    row.push_back(a[std::size_t(it - ids.begin())]);
                }
                if (!f.find(row)) return;
            }
            out.insert(a);
            return;
        }
        for (Value x : domains.values(ids[k])) {
            a[k] = x;
            self(self, k + 1);
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace

TEST_CASE("reduce_domains intersects per-factor support") {
    // Factor one supports A in {1,2}; factor two supports A in {2,3}.
    std::vector<SparseFactor> fs{
        SparseFactor::from_rows({0, 1}, {{1, 1}, {2, 2}}),
        SparseFactor::from_rows({0}, {{2}, {3}}),
    };
    DomainTable domains({{1, 2, 3}, {1, 2}});

    PurgeOutcome out = reduce_domains(fs, domains);
    CHECK(out.changed());
    CHECK(domains.values(0) == std::vector<Value>{2});
    // Entry (1,1) of the first factor used a removed value.
    CHECK(support_of(fs[0]) == std::set<std::vector<Value>>{{2, 2}});
    CHECK(out.entries_removed >= 2);

    SUBCASE("removed values are itemised") {
        std::set<std::pair<VariableId, Value>> removed(
            out.removed_values.begin(), out.removed_values.end());
        CHECK(removed.count({0, 1}) == 1);
        CHECK(removed.count({0, 3}) == 1);
    }
    SUBCASE("a second pass is a no-op") {
        PurgeOutcome again = reduce_domains(fs, domains);
        CHECK_FALSE(again.changed());
    }
}

TEST_CASE("reduce_domains cascades removals to fixpoint") {
    // Chain: pruning A's value 1 kills B's value 1, which kills C's value 1.
    std::vector<SparseFactor> fs{
        SparseFactor::from_rows({0}, {{2}}),
        SparseFactor::from_rows({0, 1}, {{1, 1}, {2, 2}}),
        SparseFactor::from_rows({1, 2}, {{1, 1}, {2, 2}}),
    };
    DomainTable domains({{1, 2}, {1, 2}, {1, 2}});
    PurgeOutcome out = reduce_domains(fs, domains);
    CHECK(domains.values(1) == std::vector<Value>{2});
    CHECK(domains.values(2) == std::vector<Value>{2});
    CHECK(out.removed_values.size() == 3);
}

TEST_CASE("reduce_domains raises when a domain empties") {
    std::vector<SparseFactor> fs{
        SparseFactor::from_rows({0}, {{1}}),
        SparseFactor::from_rows({0}, {{2}}),
    };
    DomainTable domains({{1, 2}});
    CHECK_THROWS_AS(reduce_domains(fs, domains), UnsatisfiableError);
}

TEST_CASE("reduce_variables observes singletons everywhere") {
    // A is forced to 2 by the first factor; observing it shrinks the others
    // and forces B, which cascades into C.
    std::vector<SparseFactor> fs{
        SparseFactor::from_rows({0}, {{2}}),
        SparseFactor::from_rows({0, 1}, {{1, 1}, {2, 2}}),
        SparseFactor::from_rows({1, 2}, {{1, 1}, {2, 2}, {2, 1}}),
    };
    DomainTable domains({{1, 2}, {1, 2}, {1, 2}});

    PurgeOutcome out = reduce_variables(fs, domains);
    std::set<std::pair<VariableId, Value>> solved(out.solved.begin(),
                                                  out.solved.end());
    CHECK(solved.count({0, 2}) == 1);
    CHECK(solved.count({1, 2}) == 1);
    // C keeps both values: rows (2,2) and (2,1) survive B=2.
    CHECK(solved.count({2, 1}) == 0);

    // Solved variables leave every scope; emptied factors are dropped.
    for (const auto& f : fs) {
        CHECK_FALSE(f.scope_contains(0));
        CHECK_FALSE(f.scope_contains(1));
        CHECK(f.width() > 0);
    }
    REQUIRE(fs.size() == 1);
    CHECK(support_of(fs[0]) == std::set<std::vector<Value>>{{1}, {2}});

    SUBCASE("domains of solved variables are restricted") {
        CHECK(domains.values(0) == std::vector<Value>{2});
        CHECK(domains.values(1) == std::vector<Value>{2});
        CHECK(domains.values(2) == std::vector<Value>{1, 2});
    }
}

TEST_CASE("reduce_variables raises when an observation empties a factor") {
    std::vector<SparseFactor> fs{
        SparseFactor::from_rows({0}, {{1}}),
        SparseFactor::from_rows({0, 1}, {{2, 1}, {2, 2}}),
    };
    DomainTable domains({{1, 2}, {1, 2}});
    CHECK_THROWS_AS(reduce_variables(fs, domains), UnsatisfiableError);
}

TEST_CASE("purging preserves the joint support") {
    // Randomised: alternating reductions must not change the set of joint
    // assignments over the surviving variables, modulo solved pins.
    std::mt19937 rng(555);
    for (int trial = 0; trial < 80; ++trial) {
        const int n = 3 + int(rng() % 3);
        std::vector<std::vector<Value>> doms;
        for (int v = 0; v < n; ++v) {
            std::vector<Value> d;
            for (Value x = 1; x <= Value(2 + rng() % 2); ++x) d.push_back(x);
            doms.push_back(d);
        }
        DomainTable domains(doms);
        std::vector<VariableId> ids;
        for (int v = 0; v < n; ++v) ids.push_back(VariableId(v));

        std::vector<SparseFactor> fs;
        const int m = 1 + int(rng() % 3);
        for (int c = 0; c < m; ++c) {
            VariableId a = VariableId(rng() % n);
            VariableId b = VariableId(rng() % n);
            if (a == b) b = VariableId((b + 1) % n);
            std::vector<VariableId> scope{std::min(a, b), std::max(a, b)};
            std::vector<std::vector<Value>> rows;
            for (Value x : domains.values(scope[0])) {
                for (Value y : domains.values(scope[1])) {
                    if (rng() % 3 != 0) rows.push_back({x, y});
                }
            }
            if (rows.empty()) rows.push_back({domains.values(scope[0])[0],
                                              domains.values(scope[1])[0]});
            fs.push_back(SparseFactor::from_rows(scope, rows));
        }

        auto before = joint_support(fs, domains, ids);

        Evidence solved;
        bool unsat = false;
        try {
            for (;;) {
                PurgeOutcome a = reduce_domains(fs, domains);
                PurgeOutcome b = reduce_variables(fs, domains);
                for (auto& p : b.solved) solved.push_back(p);
                if (!a.changed() && !b.changed()) break;
            }
        } catch (const UnsatisfiableError&) {
            unsat = true;
        }

        CAPTURE(trial);
        if (unsat) {
            CHECK(before.empty());
            continue;
        }

        // Rebuild the joint over the original ids: surviving factors plus
        // the solved pins.
        std::vector<SparseFactor> check = fs;
        for (const auto& [v, x] : solved) {
            check.push_back(SparseFactor::from_rows({v}, {{x}}));
        }
        CHECK(joint_support(check, domains, ids) == before);
    }
}
