#include "pnm/cluster_graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace pnm {

namespace {

// Union-find over cluster indices.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    // Returns false if x and y were already connected.
    bool unite(std::size_t x, std::size_t y) {
        x = find(x);
        y = find(y);
        if (x == y) return false;
        parent_[x] = y;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

ClusterGraph::ClusterGraph(std::vector<SparseFactor> clusters,
                           std::vector<ClusterEdge> edges)
    : clusters_(std::move(clusters)), edges_(std::move(edges)) {
    incident_.resize(clusters_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        ClusterEdge& edge = edges_[e];
        require(edge.a < edge.b && edge.b < clusters_.size(),
                "edge endpoints must be distinct valid cluster indices");
        require(!edge.sepset.empty(), "sepsets must be non-empty");
        require(std::is_sorted(edge.sepset.begin(), edge.sepset.end()),
                "sepsets must be sorted");
        require(scope_subset(edge.sepset, scope_intersection(
                                              clusters_[edge.a].scope(),
                                              clusters_[edge.b].scope())),
                "sepset must lie inside the endpoint scope intersection");
        incident_[edge.a].push_back(e);
        incident_[edge.b].push_back(e);
    }
}

ClusterGraph ltrip(std::vector<SparseFactor> clusters) {
    require(!clusters.empty(), "ltrip needs at least one cluster");
    const std::size_t n = clusters.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            require(i == j || !scope_subset(clusters[i].scope(),
                                            clusters[j].scope()),
                    "ltrip requires subsumed scopes to be absorbed first");
        }
    }

    // Clusters containing each variable.
    std::map<VariableId, std::vector<std::size_t>> holders;
    for (std::size_t i = 0; i < n; ++i) {
        for (VariableId v : clusters[i].scope()) holders[v].push_back(i);
    }

    // Pairwise scope-intersection sizes, the edge weights.
    auto weight = [&](std::size_t i, std::size_t j) {
        return scope_intersection(clusters[i].scope(), clusters[j].scope())
            .size();
    };

    std::map<std::pair<std::size_t, std::size_t>, std::vector<VariableId>>
        sepsets;
    for (const auto& [var, held] : holders) {
        if (held.size() < 2) continue;
        // Prim growth from the smallest cluster id; among the maximum-weight
        // crossing edges pick the lexicographically smallest (id, id) pair.
        std::set<std::size_t> in_tree{held.front()};
        while (in_tree.size() < held.size()) {
            std::size_t best_w = 0;
            std::pair<std::size_t, std::size_t> best{0, 0};
            bool found = false;
            for (std::size_t i : held) {
                if (!in_tree.count(i)) continue;
                for (std::size_t j : held) {
                    if (in_tree.count(j)) continue;
                    std::size_t w = weight(i, j);
                    std::pair<std::size_t, std::size_t> key{std::min(i, j),
                                                            std::max(i, j)};
                    if (!found || w > best_w || (w == best_w && key < best)) {
                        best_w = w;
                        best = key;
                        found = true;
                    }
                }
            }
            in_tree.insert(best.first);
            in_tree.insert(best.second);
            sepsets[best].push_back(var);
        }
    }

    std::vector<ClusterEdge> edges;
    edges.reserve(sepsets.size());
    for (auto& [pair, vars] : sepsets) {
        std::sort(vars.begin(), vars.end());
        edges.push_back({pair.first, pair.second, std::move(vars)});
    }
    return ClusterGraph(std::move(clusters), std::move(edges));
}

RipReport validate_rip(const ClusterGraph& g) {
    std::map<VariableId, std::vector<std::size_t>> holders;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (VariableId v : g.factor(i).scope()) holders[v].push_back(i);
    }

    RipReport report;
    for (const auto& [var, held] : holders) {
        DisjointSets ds(g.size());
        bool ok = true;
        std::size_t used_edges = 0;
        for (const ClusterEdge& e : g.edges()) {
            if (!std::binary_search(e.sepset.begin(), e.sepset.end(), var)) {
                continue;
            }
            ++used_edges;
            if (!ds.unite(e.a, e.b)) {
                ok = false;  // cycle among the edges carrying var
                break;
            }
        }
        // A tree spanning all holders needs exactly |held| - 1 edges and a
        // single component over them.
        if (ok && used_edges != held.size() - 1) ok = false;
        if (ok) {
            for (std::size_t i : held) {
                if (ds.find(i) != ds.find(held.front())) {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok) report.violations.push_back(var);
    }
    return report;
}

bool is_tree(const ClusterGraph& g) {
    DisjointSets ds(g.size());
    for (const ClusterEdge& e : g.edges()) {
        if (!ds.unite(e.a, e.b)) return false;
    }
    return true;
}

std::string dump_graph(const ClusterGraph& g,
                       const std::function<std::string(VariableId)>& name) {
    std::ostringstream os;
    for (std::size_t i = 0; i < g.size(); ++i) {
        os << "cluster " << i << ": {";
        const auto& scope = g.factor(i).scope();
        for (std::size_t k = 0; k < scope.size(); ++k) {
            os << (k ? "," : "") << name(scope[k]);
        }
        os << "} entries=" << g.factor(i).size() << "\n";
    }
    for (const ClusterEdge& e : g.edges()) {
        os << "edge " << e.a << "-" << e.b << ": sepset {";
        for (std::size_t k = 0; k < e.sepset.size(); ++k) {
            os << (k ? "," : "") << name(e.sepset[k]);
        }
        os << "}\n";
    }
    return os.str();
}

}  // namespace pnm
