#include "pnm/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace pnm {

namespace {

// Cheap kind-specific feasibility check on a partial assignment. `assigned`
// marks which variables hold a value. Must never reject an extendable
// prefix; completeness of the final check is guaranteed by re-running the
// full predicate once every scope variable is assigned.
bool partially_consistent(const Clause& c, const std::vector<Value>& a,
                          const std::vector<char>& assigned,
                          const DomainTable& domains) {
    std::size_t unassigned = 0;
    for (VariableId v : c.scope) unassigned += !assigned[v];
    if (unassigned == 0) return clause_satisfied(c, a);

    struct Visitor {
        const Clause& c;
        const std::vector<Value>& a;
        const std::vector<char>& assigned;
        const DomainTable& domains;
        std::size_t unassigned;

        bool distinct_so_far() const {
            for (std::size_t i = 0; i < c.scope.size(); ++i) {
                if (!assigned[c.scope[i]]) continue;
                for (std::size_t j = i + 1; j < c.scope.size(); ++j) {
                    if (!assigned[c.scope[j]]) continue;
                    if (a[c.scope[i]] == a[c.scope[j]]) return false;
                }
            }
            return true;
        }

        bool sum_within(long long total) const {
            long long lo = 0, hi = 0;
            for (VariableId v : c.scope) {
                if (assigned[v]) {
                    lo += a[v];
                    hi += a[v];
                } else {
                    lo += domains.values(v).front();
                    hi += domains.values(v).back();
                }
            }
            return lo <= total && total <= hi;
        }

        bool operator()(const AllDiffClause&) const {
            return distinct_so_far();
        }
        bool operator()(const SumClause& s) const {
            if (!sum_within(s.total)) return false;
            return !s.distinct || distinct_so_far();
        }
        bool operator()(const CageClause& g) const {
            switch (g.op) {
                case CageOp::Add:
                    return sum_within(g.target);
                case CageOp::Mul: {
                    long long lo = 1, hi = 1;
                    for (VariableId v : c.scope) {
                        Value vmin = assigned[v] ? a[v]
                                                 : domains.values(v).front();
                        Value vmax = assigned[v] ? a[v]
                                                 : domains.values(v).back();
                        if (vmin <= 0) return true;  // bounds need positives
                        lo *= vmin;
                        hi *= vmax;
                    }
                    return lo <= g.target && g.target <= hi;
                }
                case CageOp::Sub:
                case CageOp::Div:
                    return true;  // two cells: checked once complete
            }
            return true;
        }
        bool operator()(const CountClause& k) const {
            long long ones = 0;
            for (VariableId v : c.scope) ones += (assigned[v] && a[v] == 1);
            return ones <= k.clue &&
                   ones + (long long)unassigned >= k.clue;
        }
        bool operator()(const TableClause& t) const {
            for (const auto& row : t.entries) {
                bool match = true;
                for (std::size_t i = 0; i < c.scope.size(); ++i) {
                    if (assigned[c.scope[i]] && a[c.scope[i]] != row[i]) {
                        match = false;
                        break;
                    }
                }
                if (match) return true;
            }
            return false;
        }
    };
    return std::visit(Visitor{c, a, assigned, domains, unassigned}, c.spec);
}

}  // namespace

OracleResult brute_force_solutions(const CspInstance& inst,
                                   const SearchBudget& budget,
                                   const std::vector<VariableId>* order) {
    validate_instance(inst);
    const std::size_t n = inst.num_variables();

    std::vector<VariableId> seq(n);
    std::iota(seq.begin(), seq.end(), 0);
    if (order) {
        require(order->size() == n, "order must cover every variable");
        seq = *order;
        auto check = seq;
        std::sort(check.begin(), check.end());
        for (std::size_t i = 0; i < n; ++i) {
            require(check[i] == i, "order must be a permutation");
        }
    }

    // Evidence narrows the search domains; everything else is untouched.
    DomainTable domains = inst.domains;
    for (const auto& [v, x] : inst.evidence) domains.restrict_to(v, x);

    // Clauses touching each variable, for forward checking on assignment.
    std::vector<std::vector<const Clause*>> watching(n);
    for (const Clause& c : inst.clauses) {
        for (VariableId v : c.scope) watching[v].push_back(&c);
    }

    OracleResult result;
    std::vector<Value> a(n, 0);
    std::vector<char> assigned(n, 0);
    bool stop = false;

    auto dfs = [&](auto&& self, std::size_t depth) -> void {
        if (stop) return;
        if (depth == n) {
            result.solutions.push_back(a);
            if (result.solutions.size() >= budget.max_solutions) {
                result.budget_exceeded = true;
                stop = true;
            }
            return;
        }
        VariableId v = seq[depth];
        for (Value x : domains.values(v)) {
            if (++result.nodes > budget.max_nodes) {
                result.budget_exceeded = true;
                stop = true;
                return;
            }
            a[v] = x;
            assigned[v] = 1;
            bool ok = true;
            for (const Clause* c : watching[v]) {
                if (!partially_consistent(*c, a, assigned, domains)) {
                    ok = false;
                    break;
                }
            }
            if (ok) self(self, depth + 1);
            assigned[v] = 0;
            if (stop) return;
        }
    };
    dfs(dfs, 0);
    return result;
}

}  // namespace pnm
