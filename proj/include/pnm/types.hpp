#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pnm {

/// Dense handle for a variable. Ids are unique within one problem instance
/// and index directly into its name/domain tables.
using VariableId = std::uint32_t;

/// A single admissible value. Puzzle domains are small integers; anything
/// that fits is accepted.
using Value = std::int16_t;

/// Observed (variable, value) pairs. Each variable appears at most once.
using Evidence = std::vector<std::pair<VariableId, Value>>;

/// Raised when some factor or domain empties: the instance has no solution.
class UnsatisfiableError : public std::runtime_error {
public:
    explicit UnsatisfiableError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Raised when an operation would materialise more table entries than the
/// configured budget allows. Carries the attempted size.
class TableBlowupError : public std::runtime_error {
public:
    TableBlowupError(const std::string& what, std::uint64_t attempted)
        : std::runtime_error(what), attempted_entries(attempted) {}
    std::uint64_t attempted_entries;
};

/// Raised when propagation exceeds its message budget without converging.
class MessageBudgetError : public std::runtime_error {
public:
    explicit MessageBudgetError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Raised when a solve exceeds its wall-clock limit.
class TimeoutError : public std::runtime_error {
public:
    explicit TimeoutError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Raised on malformed puzzle input.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Contract violation: a caller broke a documented precondition.
[[noreturn]] void contract_violation(const std::string& what);

inline void require(bool ok, const char* what) {
    if (!ok) contract_violation(what);
}

/// Entry-count budget shared by every table-materialising operation of one
/// solve. charge() admits a table of n entries or throws; peak bookkeeping
/// feeds the run statistics.
class TableBudget {
public:
    static constexpr std::uint64_t kUnlimited =
        std::numeric_limits<std::uint64_t>::max();

    explicit TableBudget(std::uint64_t max_entries = kUnlimited)
        : max_entries_(max_entries) {}

    void charge(std::uint64_t entries) {
        if (entries > max_entries_) {
            throw TableBlowupError(
                "table of " + std::to_string(entries) +
                    " entries exceeds the budget of " +
                    std::to_string(max_entries_),
                entries);
        }
        if (entries > peak_) peak_ = entries;
        if (entries > round_peak_) round_peak_ = entries;
    }

    std::uint64_t max_entries() const { return max_entries_; }
    std::uint64_t peak() const { return peak_; }

    /// Largest table charged since the last call; used for per-round stats.
    std::uint64_t take_round_peak() {
        std::uint64_t p = round_peak_;
        round_peak_ = 0;
        return p;
    }

private:
    std::uint64_t max_entries_;
    std::uint64_t peak_ = 0;
    std::uint64_t round_peak_ = 0;
};

/// Per-variable admissible value lists, indexed by VariableId.
/// Invariant: every list is sorted ascending and duplicate-free.
class DomainTable {
public:
    DomainTable() = default;
    explicit DomainTable(std::vector<std::vector<Value>> domains);

    std::size_t num_variables() const { return domains_.size(); }
    const std::vector<Value>& values(VariableId v) const;
    std::size_t size(VariableId v) const { return values(v).size(); }
    bool contains(VariableId v, Value x) const;

    /// Removes x from v's domain. Returns false if x was absent.
    /// Throws UnsatisfiableError if the domain empties.
    bool remove(VariableId v, Value x);

    /// Restricts v's domain to {x}. Throws UnsatisfiableError if x is not
    /// currently admissible.
    void restrict_to(VariableId v, Value x);

    /// Sum of log2(domain size) over scope: the scope's upper-bound entropy
    /// in bits. Zero for the empty scope.
    double log2_space(const std::vector<VariableId>& scope) const;

    bool operator==(const DomainTable&) const = default;

private:
    std::vector<std::vector<Value>> domains_;
};

}  // namespace pnm
