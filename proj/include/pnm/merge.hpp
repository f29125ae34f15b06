#pragma once

#include <cstddef>
#include <vector>

#include "pnm/factor.hpp"
#include "pnm/types.hpp"

namespace pnm {

enum class MergeMetric { Gravity, Entropy, Overlap };

/// Number of shared variables. Symmetric; 0 for disjoint scopes.
double attraction_overlap(const std::vector<VariableId>& a,
                          const std::vector<VariableId>& b);

/// log2 of the shared variables' joint domain size. Symmetric.
double attraction_entropy(const std::vector<VariableId>& a,
                          const std::vector<VariableId>& b,
                          const DomainTable& domains);

/// How far a factor's support falls below its scope's full space, in bits:
/// log2(D / k) for k entries in a space of D tuples, computed in log space.
/// Zero for a full-space table. Throws UnsatisfiableError on an empty factor.
double mass(const SparseFactor& f, const DomainTable& domains);

/// log2 of the ratio between the union's and the intersection's joint
/// domain bits. Requires a non-empty intersection. Zero when neither scope
/// adds bits beyond the shared part (mutual subsumption).
double distance(const std::vector<VariableId>& a,
                const std::vector<VariableId>& b, const DomainTable& domains);

/// Gravity-style pull of one cluster on another: mass_i / r². Requires r > 0
/// (zero-distance pairs are handled upstream as infinitely attracted).
double attraction_gravity(double mass_i, double r_ij);

/// Greedy agglomeration: repeatedly merge the strongest-attracted cluster
/// pair whose union scope stays within `h_tau` bits, discarding attractions
/// that would break the bound, until none remain. Attractions exist only
/// between clusters with overlapping scopes; under the gravity metric a
/// zero-distance pair (subsumed scope) is infinitely attracted. Returns
/// groups of input-factor indices; their disjoint union is the input.
std::vector<std::vector<std::size_t>> cluster_factors(
    const std::vector<SparseFactor>& factors, double h_tau,
    MergeMetric metric, const DomainTable& domains);

/// Product of all members, folded in ascending entry-count order so small
/// tables constrain the join early. Budget-checked like any product.
SparseFactor merge_cluster(const std::vector<const SparseFactor*>& cluster,
                           TableBudget* budget = nullptr);

/// Repeatedly folds any factor whose scope is contained in another's into
/// that factor (ltrip precondition). Survivors keep their relative order.
std::vector<SparseFactor> absorb_subsumed(std::vector<SparseFactor> factors,
                                          TableBudget* budget = nullptr);

}  // namespace pnm
