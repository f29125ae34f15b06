#include "pnm/csp.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

namespace pnm {

const char* clause_kind_name(const Clause& c) {
    struct Visitor {
        const char* operator()(const AllDiffClause&) const { return "alldiff"; }
        const char* operator()(const SumClause&) const { return "sum"; }
        const char* operator()(const CageClause&) const { return "cage"; }
        const char* operator()(const CountClause&) const { return "count"; }
        const char* operator()(const TableClause&) const { return "table"; }
    };
    return std::visit(Visitor{}, c.spec);
}

std::optional<VariableId> CspInstance::find_variable(
    const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return VariableId(i);
    }
    return std::nullopt;
}

void validate_instance(const CspInstance& inst) {
    const std::size_t n = inst.num_variables();
    if (inst.domains.num_variables() != n) {
        throw ParseError("instance declares " + std::to_string(n) +
                         " names but " +
                         std::to_string(inst.domains.num_variables()) +
                         " domains");
    }
    for (std::size_t ci = 0; ci < inst.clauses.size(); ++ci) {
        const Clause& c = inst.clauses[ci];
        const std::string where =
            "clause " + std::to_string(ci) + " (" + clause_kind_name(c) + ")";
        if (c.scope.empty()) throw ParseError(where + ": empty scope");
        std::set<VariableId> seen;
        for (VariableId v : c.scope) {
            if (v >= n) {
                throw ParseError(where + ": unknown variable id " +
                                 std::to_string(v));
            }
            if (!seen.insert(v).second) {
                throw ParseError(where + ": variable " + inst.names[v] +
                                 " appears twice in the scope");
            }
        }
        if (const auto* cage = std::get_if<CageClause>(&c.spec)) {
            if ((cage->op == CageOp::Sub || cage->op == CageOp::Div) &&
                c.scope.size() != 2) {
                throw ParseError(where +
                                 ": sub/div cages take exactly two cells");
            }
        }
        if (std::holds_alternative<CountClause>(c.spec)) {
            const auto& clue = std::get<CountClause>(c.spec).clue;
            if (clue < 0) throw ParseError(where + ": negative clue");
            for (VariableId v : c.scope) {
                for (Value x : inst.domains.values(v)) {
                    if (x != 0 && x != 1) {
                        throw ParseError(where + ": variable " +
                                         inst.names[v] +
                                         " is not binary-valued");
                    }
                }
            }
        }
        if (const auto* tab = std::get_if<TableClause>(&c.spec)) {
            for (const auto& row : tab->entries) {
                if (row.size() != c.scope.size()) {
                    throw ParseError(where + ": table entry width " +
                                     std::to_string(row.size()) +
                                     " does not match the scope");
                }
                for (std::size_t k = 0; k < row.size(); ++k) {
                    if (!inst.domains.contains(c.scope[k], row[k])) {
                        throw ParseError(
                            where + ": table entry value " +
                            std::to_string(row[k]) +
                            " is outside the domain of " +
                            inst.names[c.scope[k]]);
                    }
                }
            }
        }
    }
    std::set<VariableId> observed;
    for (const auto& [v, x] : inst.evidence) {
        if (v >= n) {
            throw ParseError("evidence names unknown variable id " +
                             std::to_string(v));
        }
        if (!observed.insert(v).second) {
            throw ParseError("evidence names variable " + inst.names[v] +
                             " twice");
        }
        if (!inst.domains.contains(v, x)) {
            throw ParseError("evidence value " + std::to_string(x) +
                             " is outside the domain of " + inst.names[v]);
        }
    }
}

namespace {

bool pairwise_distinct(const std::vector<VariableId>& scope,
                       std::span<const Value> a) {
    for (std::size_t i = 0; i < scope.size(); ++i) {
        for (std::size_t j = i + 1; j < scope.size(); ++j) {
            if (a[scope[i]] == a[scope[j]]) return false;
        }
    }
    return true;
}

}  // namespace

bool clause_satisfied(const Clause& c, std::span<const Value> a) {
    struct Visitor {
        const Clause& c;
        std::span<const Value> a;

        bool operator()(const AllDiffClause&) const {
            return pairwise_distinct(c.scope, a);
        }
        bool operator()(const SumClause& s) const {
            long long sum = 0;
            for (VariableId v : c.scope) sum += a[v];
            if (sum != s.total) return false;
            return !s.distinct || pairwise_distinct(c.scope, a);
        }
        bool operator()(const CageClause& g) const {
            switch (g.op) {
                case CageOp::Add: {
                    long long sum = 0;
                    for (VariableId v : c.scope) sum += a[v];
                    return sum == g.target;
                }
                case CageOp::Mul: {
                    long long prod = 1;
                    for (VariableId v : c.scope) prod *= a[v];
                    return prod == g.target;
                }
                case CageOp::Sub: {
                    long long x = a[c.scope[0]], y = a[c.scope[1]];
                    return std::llabs(x - y) == g.target;
                }
                case CageOp::Div: {
                    long long x = a[c.scope[0]], y = a[c.scope[1]];
                    return x == g.target * y || y == g.target * x;
                }
            }
            return false;
        }
        bool operator()(const CountClause& k) const {
            long long ones = 0;
            for (VariableId v : c.scope) ones += (a[v] == 1);
            return ones == k.clue;
        }
        bool operator()(const TableClause& t) const {
            for (const auto& row : t.entries) {
                bool match = true;
                for (std::size_t i = 0; i < c.scope.size(); ++i) {
                    if (a[c.scope[i]] != row[i]) {
                        match = false;
                        break;
                    }
                }
                if (match) return true;
            }
            return false;
        }
    };
    return std::visit(Visitor{c, a}, c.spec);
}

bool verify_solution(const CspInstance& inst, std::span<const Value> a,
                     std::string* why) {
    auto fail = [&](const std::string& reason) {
        if (why) *why = reason;
        return false;
    };
    if (a.size() != inst.num_variables()) {
        return fail("assignment covers " + std::to_string(a.size()) +
                    " of " + std::to_string(inst.num_variables()) +
                    " variables");
    }
    for (std::size_t v = 0; v < a.size(); ++v) {
        if (!inst.domains.contains(VariableId(v), a[v])) {
            return fail("value " + std::to_string(a[v]) +
                        " is outside the domain of " + inst.names[v]);
        }
    }
    for (const auto& [v, x] : inst.evidence) {
        if (a[v] != x) {
            return fail("assignment contradicts the given " + inst.names[v] +
                        " = " + std::to_string(x));
        }
    }
    for (std::size_t ci = 0; ci < inst.clauses.size(); ++ci) {
        if (!clause_satisfied(inst.clauses[ci], a)) {
            return fail("clause " + std::to_string(ci) + " (" +
                        clause_kind_name(inst.clauses[ci]) + ") is violated");
        }
    }
    return true;
}

}  // namespace pnm
