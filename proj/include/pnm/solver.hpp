#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pnm/cluster_graph.hpp"
#include "pnm/csp.hpp"
#include "pnm/factor.hpp"
#include "pnm/merge.hpp"
#include "pnm/types.hpp"

namespace pnm {

enum class Outcome { Solved, Unsatisfiable, TableBlowup, BudgetExhausted };

/// Stable lowercase name: solved | unsatisfiable | blowup | budget.
const char* outcome_name(Outcome o);

enum class SolvePhase { AfterPropagate, AfterPurge };

struct SolverConfig {
    /// Round-0 threshold = this factor times the largest initial factor's
    /// upper-bound entropy (bits).
    double threshold_init_factor = 1.5;

    /// Bits added to the threshold each round. Unset means log2 of the
    /// largest domain size (at least one bit), so a round admits roughly one
    /// more variable per cluster. Must be positive when set.
    std::optional<double> threshold_growth_bits;

    /// Entry cap for any single materialised table.
    std::uint64_t max_table_entries = 5'000'000;

    /// Outer-loop round cap.
    std::uint64_t max_rounds = 64;

    /// Propagation budget: messages allowed per directed edge per round.
    std::uint64_t messages_per_edge = 50;

    MergeMetric metric = MergeMetric::Gravity;

    /// Stop cap for enumerate_solutions when driven through the CLI.
    std::uint64_t enumeration_cap = std::uint64_t(-1);

    /// Wall-clock cutoff for the whole solve.
    std::optional<std::chrono::steady_clock::time_point> deadline;

    /// Test/diagnostic hook, called with the model state twice per round.
    std::function<void(SolvePhase, const std::vector<SparseFactor>&,
                       const DomainTable&, const Evidence&)>
        checkpoint;
};

/// Throws std::invalid_argument on non-positive budgets, factors, or growth.
void validate_config(const SolverConfig& config);

struct RoundStats {
    std::uint64_t round = 0;
    double threshold_bits = 0.0;
    std::size_t clusters = 0;            // after merging and absorption
    std::uint64_t max_table_entries = 0; // largest table built this round
    std::uint64_t messages = 0;
    std::uint64_t supports_purged = 0;   // entries dropped by messages + purge
    double wall_seconds = 0.0;
};

struct SolveReport {
    Outcome outcome = Outcome::Solved;
    std::string detail;
    std::size_t num_variables = 0;

    /// Variables pinned to a single value, sorted by id.
    Evidence solved;

    /// Calibrated residual factors plus a junction forest over them. On
    /// success their scopes together with `solved` cover every variable;
    /// empty when the solve pinned everything.
    std::vector<SparseFactor> residual;
    std::vector<ClusterEdge> residual_edges;

    DomainTable domains;  // final per-variable domains
    std::vector<RoundStats> rounds;
    std::uint64_t peak_table_entries = 0;
};

/// Threshold for the given round: base × init-factor + round × growth, where
/// base is the largest upper-bound entropy among the instance's initial
/// factors (clause scopes minus evidence variables). Strictly increasing.
double threshold_schedule(std::uint64_t round, const CspInstance& inst,
                          const SolverConfig& config);

/// The outer loop: fold evidence, compile clauses to sparse tables, then
/// alternate cluster → merge → graph construction → propagation → domain and
/// variable purging under a rising threshold until the graph is a forest
/// (exact) or everything is pinned. Failures are reported as outcomes, not
/// exceptions: unsatisfiable, table blow-up, or exhausted budgets.
SolveReport purge_and_merge(const CspInstance& inst,
                            const SolverConfig& config = {});

struct SolutionSet {
    /// Complete assignments indexed by VariableId.
    std::vector<std::vector<Value>> solutions;
    bool truncated = false;  // the cap cut enumeration short
};

/// Walks the residual forest depth-first, joining factor rows consistently
/// and extending each complete joint row with the solved values. Requires a
/// successful solve. Stops after `cap` solutions and marks truncation.
SolutionSet enumerate_solutions(const SolveReport& report,
                                std::uint64_t cap = std::uint64_t(-1));

}  // namespace pnm
