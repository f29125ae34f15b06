#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pnm/types.hpp"

namespace pnm {

/// Sparse table over a set of variables: only assignments with non-zero
/// potential are stored. Scope is kept sorted by variable id and rows are
/// kept in lexicographic order, so structurally equal factors compare equal.
///
/// Invariants:
///  - scope is strictly ascending, tuples are unique, width(row) == |scope|
///  - stored potentials are > 0 (zeros are represented by absence)
///  - a factor with entries but empty scope is the unit table (one row)
class SparseFactor {
public:
    /// Empty-support factor over an empty scope.
    SparseFactor() = default;

    /// Factor with no entries over the given scope.
    static SparseFactor zero(std::vector<VariableId> scope);

    /// Empty-scope factor with a single entry of the given potential.
    static SparseFactor unit(double potential = 1.0);

    /// Builds a factor from rows given in `scope` order (scope need not be
    /// sorted; columns are permuted into canonical order). Zero potentials
    /// are dropped; duplicate tuples collapse to their maximum potential;
    /// negative potentials are a contract violation.
    static SparseFactor from_rows(std::vector<VariableId> scope,
                                  std::vector<std::vector<Value>> rows,
                                  std::vector<double> potentials);

    /// Same, with every potential 1.
    static SparseFactor from_rows(std::vector<VariableId> scope,
                                  std::vector<std::vector<Value>> rows);

    /// All-ones factor over the full domain product of `scope`.
    static SparseFactor full_support(std::vector<VariableId> scope,
                                     const DomainTable& domains,
                                     TableBudget* budget = nullptr);

    const std::vector<VariableId>& scope() const { return scope_; }
    std::size_t width() const { return scope_.size(); }
    std::size_t size() const { return pot_.size(); }
    bool empty() const { return pot_.empty(); }

    std::span<const Value> row(std::size_t i) const {
        return {data_.data() + i * scope_.size(), scope_.size()};
    }
    double potential(std::size_t i) const { return pot_[i]; }

    /// Index of a tuple given in canonical scope order, if present.
    std::optional<std::size_t> find(std::span<const Value> row) const;

    /// Position of v inside the scope; contract violation if absent.
    std::size_t scope_position(VariableId v) const;
    bool scope_contains(VariableId v) const;

    bool operator==(const SparseFactor&) const = default;

    std::string to_string() const;

private:
    friend class FactorBuilder;
    friend SparseFactor product(const SparseFactor&, const SparseFactor&,
                                TableBudget*);
    friend SparseFactor max_marginalise(const SparseFactor&,
                                        std::vector<VariableId>);
    friend SparseFactor observe(const SparseFactor&, const Evidence&);
    friend SparseFactor divide(const SparseFactor&, const SparseFactor&);
    friend SparseFactor max_normalise(const SparseFactor&);
    friend SparseFactor restrict_variable(const SparseFactor&, VariableId,
                                          const std::vector<Value>&);

    std::vector<VariableId> scope_;
    std::vector<Value> data_;  // size() * width(), rows sorted lexicographically
    std::vector<double> pot_;
};

/// Incremental row sink used by the table generators: rows must be appended
/// in canonical lexicographic order (checked); the budget is charged as the
/// table grows so oversized generation aborts early.
class FactorBuilder {
public:
    FactorBuilder(std::vector<VariableId> sorted_scope, TableBudget* budget);
    void append(std::span<const Value> row, double potential = 1.0);
    SparseFactor finish();

private:
    SparseFactor f_;
    TableBudget* budget_;
};

/// Join of two tables: scope is the union, an output row exists wherever the
/// operands agree on their shared variables, potentials multiply. The exact
/// output size is counted before materialising and charged to `budget`.
SparseFactor product(const SparseFactor& a, const SparseFactor& b,
                     TableBudget* budget = nullptr);

/// Projects onto `target` (a subset of the scope), keeping the maximum
/// potential among the rows that collapse together.
SparseFactor max_marginalise(const SparseFactor& f,
                             std::vector<VariableId> target);

/// Drops rows incompatible with the evidence and removes the observed
/// variables from the scope. Evidence variables outside the scope are
/// ignored. An empty result signals an unsatisfiable observation.
SparseFactor observe(const SparseFactor& f, const Evidence& evidence);

/// Pointwise quotient; den's scope must be a subset of num's. Absent entries
/// divide as 0/0 = 0; a stored (non-zero) numerator over a zero denominator
/// is a contract violation.
SparseFactor divide(const SparseFactor& num, const SparseFactor& den);

/// Scales potentials so the maximum is 1. The empty factor is unchanged.
SparseFactor max_normalise(const SparseFactor& f);

/// Number of tuples in exactly one of the two supports. Scopes must match.
std::uint64_t support_divergence(const SparseFactor& a, const SparseFactor& b);

/// Values of v that appear in f's support. Sorted ascending.
std::vector<Value> supported_values(const SparseFactor& f, VariableId v);

/// Keeps only the rows whose value for v lies in `allowed` (sorted). The
/// scope is unchanged. v must be in the scope.
SparseFactor restrict_variable(const SparseFactor& f, VariableId v,
                               const std::vector<Value>& allowed);

/// Sorted union / intersection of two sorted scopes.
std::vector<VariableId> scope_union(const std::vector<VariableId>& a,
                                    const std::vector<VariableId>& b);
std::vector<VariableId> scope_intersection(const std::vector<VariableId>& a,
                                           const std::vector<VariableId>& b);
bool scope_subset(const std::vector<VariableId>& inner,
                  const std::vector<VariableId>& outer);

}  // namespace pnm
