#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pnm/factor.hpp"
#include "pnm/types.hpp"

namespace pnm {

struct ClusterEdge {
    std::size_t a = 0, b = 0;        // cluster indices, a < b
    std::vector<VariableId> sepset;  // sorted, non-empty, ⊆ scope(a) ∩ scope(b)
};

/// Clusters (each carrying its factor) plus sepset-labelled edges.
/// Cluster scopes are the attached factors' scopes.
class ClusterGraph {
public:
    ClusterGraph() = default;
    ClusterGraph(std::vector<SparseFactor> clusters,
                 std::vector<ClusterEdge> edges);

    std::size_t size() const { return clusters_.size(); }
    const SparseFactor& factor(std::size_t i) const { return clusters_[i]; }
    SparseFactor& factor(std::size_t i) { return clusters_[i]; }
    std::vector<SparseFactor> take_factors() { return std::move(clusters_); }

    const std::vector<ClusterEdge>& edges() const { return edges_; }
    /// Indices into edges() incident to cluster i.
    const std::vector<std::size_t>& incident(std::size_t i) const {
        return incident_[i];
    }

private:
    std::vector<SparseFactor> clusters_;
    std::vector<ClusterEdge> edges_;
    std::vector<std::vector<std::size_t>> incident_;
};

/// Builds a RIP-satisfying graph over the given clusters: per variable X, a
/// maximum-weight spanning tree (weights |C_i ∩ C_j|, Prim growth, ties to
/// the lexicographically smallest cluster-id pair) over the clusters
/// containing X contributes {X} to its edges' sepsets; the final graph is
/// the superposition of those trees.
///
/// Callers must absorb subsumed scopes first: no cluster scope may be a
/// subset of another's.
ClusterGraph ltrip(std::vector<SparseFactor> clusters);

struct RipReport {
    std::vector<VariableId> violations;  // variables whose edges break RIP
    bool ok() const { return violations.empty(); }
};

/// Checks that for every variable the edges carrying it in their sepsets
/// form a tree spanning exactly the clusters whose scopes contain it.
RipReport validate_rip(const ClusterGraph& g);

/// True iff the edge set is acyclic (a forest counts: exact inference holds
/// per connected component).
bool is_tree(const ClusterGraph& g);

/// Text adjacency listing (cluster scopes, entry counts, sepsets) for the
/// CLI --dump-graph flag. `name` maps variable ids to display names.
std::string dump_graph(const ClusterGraph& g,
                       const std::function<std::string(VariableId)>& name);

}  // namespace pnm
