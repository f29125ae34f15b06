#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pnm/csp.hpp"
#include "pnm/factor.hpp"
#include "pnm/types.hpp"

namespace pnm {

/// Parses one Sudoku payload: 81 characters over 1-9 (4x4 variant: 16 over
/// 1-4), '.' or '0' for blanks, whitespace ignored. Produces row/column/box
/// all-different clauses (27 for 9x9, 12 for 4x4) with the givens as
/// evidence. A given repeated inside one clause is rejected here.
CspInstance parse_sudoku(const std::string& text);

/// Splits a corpus into lines (blank lines and '#' comments skipped) and
/// parses each line as one puzzle.
std::vector<CspInstance> parse_sudoku_file(const std::string& text);

/// Parses the generic JSON puzzle document (see README for the schema):
/// format-version 1, variables with explicit domains, clauses of kind
/// alldiff | sum | cage | count | table, and an evidence object.
CspInstance parse_generic(const std::string& text);

/// Inverse of parse_generic; parse(serialize(x)) == x.
std::string serialize_generic(const CspInstance& inst);

/// Renders a complete assignment in the instance's native form: one
/// 81/16-character line when the instance looks like a Sudoku grid,
/// otherwise a JSON assignment object.
std::string format_solution(const CspInstance& inst,
                            const std::vector<Value>& assignment);

/// Clause table generators. Each enumerates the satisfying assignments of
/// one clause over the *current* domains and lists them as a sparse factor;
/// the budget aborts oversized generation early. An empty result means the
/// clause is unsatisfiable under those domains.
SparseFactor encode_alldiff(const std::vector<VariableId>& vars,
                            const DomainTable& domains,
                            TableBudget* budget = nullptr);
SparseFactor encode_sum_clause(const std::vector<VariableId>& vars,
                               long long total, bool distinct,
                               const DomainTable& domains,
                               TableBudget* budget = nullptr);
SparseFactor encode_arithmetic_cage(const std::vector<VariableId>& vars,
                                    CageOp op, long long target,
                                    const DomainTable& domains,
                                    TableBudget* budget = nullptr);
SparseFactor encode_count_clause(VariableId centre,
                                 const std::vector<VariableId>& neighbours,
                                 long long clue, const DomainTable& domains,
                                 TableBudget* budget = nullptr);

/// Compiles one clause with some scope variables already pinned: `fixed` is
/// indexed by VariableId and pinned variables are dropped from the factor's
/// scope, their values folded into the predicate. The all-pinned clause
/// compiles to the unit factor when satisfied and the empty factor when not.
SparseFactor encode_clause(const Clause& clause, const DomainTable& domains,
                           const std::vector<std::optional<Value>>& fixed,
                           TableBudget* budget = nullptr);

}  // namespace pnm
