#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pnm/types.hpp"

namespace pnm {

enum class CageOp { Add, Sub, Mul, Div };

/// Values in the scope are pairwise distinct.
struct AllDiffClause {
    bool operator==(const AllDiffClause&) const = default;
};

/// Values sum to `total`; optionally pairwise distinct.
struct SumClause {
    long long total = 0;
    bool distinct = false;
    bool operator==(const SumClause&) const = default;
};

/// Arithmetic cage. Add/Mul take any scope size; Sub/Div take exactly two
/// cells and are order-free: |a-b| = target, max/min = target.
struct CageClause {
    CageOp op = CageOp::Add;
    long long target = 0;
    bool operator==(const CageClause&) const = default;
};

/// Exactly `clue` of the cells carry value 1. Domains must be {0,1}-valued.
struct CountClause {
    long long clue = 0;
    bool operator==(const CountClause&) const = default;
};

/// Explicit admissible tuples, given in the clause's scope order.
struct TableClause {
    std::vector<std::vector<Value>> entries;
    bool operator==(const TableClause&) const = default;
};

using ClauseSpec =
    std::variant<AllDiffClause, SumClause, CageClause, CountClause,
                 TableClause>;

struct Clause {
    std::vector<VariableId> scope;  // order is meaningful for TableClause
    ClauseSpec spec;
    bool operator==(const Clause&) const = default;
};

const char* clause_kind_name(const Clause& c);

/// One constraint-satisfaction problem: named variables with finite domains,
/// clauses over them, and optional observed values.
struct CspInstance {
    std::vector<std::string> names;  // indexed by VariableId
    DomainTable domains;
    std::vector<Clause> clauses;
    Evidence evidence;

    std::size_t num_variables() const { return names.size(); }
    std::optional<VariableId> find_variable(const std::string& name) const;

    bool operator==(const CspInstance&) const = default;
};

/// Throws ParseError if the instance is structurally broken: bad variable
/// references, duplicate scope entries, wrong cage arity, non-binary count
/// domains, malformed table entries, or inadmissible evidence.
void validate_instance(const CspInstance& inst);

/// Evaluates one clause against a complete assignment (indexed by id).
bool clause_satisfied(const Clause& c, std::span<const Value> assignment);

/// True iff `assignment` is complete, in-domain, consistent with the
/// instance's evidence, and satisfies every clause. When `why` is non-null
/// it receives the first failure's description.
bool verify_solution(const CspInstance& inst,
                     std::span<const Value> assignment,
                     std::string* why = nullptr);

}  // namespace pnm
