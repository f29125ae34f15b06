#pragma once

#include <cstdint>
#include <vector>

#include "pnm/csp.hpp"
#include "pnm/types.hpp"

namespace pnm {

/// Caps for the reference search. Exceeding either one aborts the run with
/// an explicit marker instead of returning a silently incomplete set.
struct SearchBudget {
    std::uint64_t max_nodes = 100'000'000;
    std::uint64_t max_solutions = std::uint64_t(-1);
};

struct OracleResult {
    /// Complete assignments indexed by VariableId, in search order.
    std::vector<std::vector<Value>> solutions;
    bool budget_exceeded = false;
    std::uint64_t nodes = 0;
};

/// Reference enumerator: depth-first search over the variables with forward
/// checking against the clause predicates. Deliberately built on the clause
/// model alone so its answers cannot inherit a table-machinery bug.
///
/// `order` optionally overrides the assignment order (a permutation of all
/// variable ids); the solution set is independent of it.
OracleResult brute_force_solutions(const CspInstance& inst,
                                   const SearchBudget& budget = {},
                                   const std::vector<VariableId>* order =
                                       nullptr);

}  // namespace pnm
