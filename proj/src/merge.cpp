#include "pnm/merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace pnm {

double attraction_overlap(const std::vector<VariableId>& a,
                          const std::vector<VariableId>& b) {
    return double(scope_intersection(a, b).size());
}

double attraction_entropy(const std::vector<VariableId>& a,
                          const std::vector<VariableId>& b,
                          const DomainTable& domains) {
    return domains.log2_space(scope_intersection(a, b));
}

double mass(const SparseFactor& f, const DomainTable& domains) {
    if (f.empty()) {
        throw UnsatisfiableError("mass of an empty factor is undefined");
    }
    const double m =
        domains.log2_space(f.scope()) - std::log2(double(f.size()));
    return std::max(0.0, m);
}

double distance(const std::vector<VariableId>& a,
                const std::vector<VariableId>& b, const DomainTable& domains) {
    const auto shared = scope_intersection(a, b);
    require(!shared.empty(), "distance needs overlapping scopes");
    const double h_union = domains.log2_space(scope_union(a, b));
    const double h_shared = domains.log2_space(shared);
    if (h_union == h_shared) return 0.0;
    if (h_shared == 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(h_union / h_shared);
}

double attraction_gravity(double mass_i, double r_ij) {
    require(r_ij > 0.0, "gravity needs a positive distance");
    return mass_i / (r_ij * r_ij);
}

namespace {

struct LiveCluster {
    std::vector<std::size_t> members;
    std::vector<VariableId> scope;
    double mass = 0.0;
    std::uint64_t gen = 0;
    bool alive = true;
};

struct Candidate {
    double attraction;
    std::size_t i, j;  // directed: i attracts j into itself
    std::uint64_t gen_i, gen_j;
};

// Max-heap by attraction; ties resolve to the smallest (i, j) pair.
struct CandidateOrder {
    bool operator()(const Candidate& x, const Candidate& y) const {
        if (x.attraction != y.attraction) return x.attraction < y.attraction;
        if (x.i != y.i) return x.i > y.i;
        return x.j > y.j;
    }
};

}  // namespace

std::vector<std::vector<std::size_t>> cluster_factors(
    const std::vector<SparseFactor>& factors, double h_tau,
    MergeMetric metric, const DomainTable& domains) {
    const std::size_t n = factors.size();
    std::vector<LiveCluster> clusters(n);
    for (std::size_t i = 0; i < n; ++i) {
        clusters[i].members = {i};
        clusters[i].scope = factors[i].scope();
        if (metric == MergeMetric::Gravity) {
            clusters[i].mass = mass(factors[i], domains);
        }
    }

    auto attract = [&](std::size_t i, std::size_t j) -> double {
        switch (metric) {
            case MergeMetric::Overlap:
                return attraction_overlap(clusters[i].scope,
                                          clusters[j].scope);
            case MergeMetric::Entropy:
                return attraction_entropy(clusters[i].scope,
                                          clusters[j].scope, domains);
            case MergeMetric::Gravity: {
                const double r =
                    distance(clusters[i].scope, clusters[j].scope, domains);
                if (r == 0.0) {
                    // Subsumption: merging adds no scope, so the pair is
                    // infinitely attracted.
                    return std::numeric_limits<double>::infinity();
                }
                if (std::isinf(r)) return 0.0;
                return attraction_gravity(clusters[i].mass, r);
            }
        }
        return 0.0;
    };

    std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder>
        heap;
    auto push_pair = [&](std::size_t i, std::size_t j) {
        if (scope_intersection(clusters[i].scope, clusters[j].scope)
                .empty()) {
            return;
        }
        heap.push({attract(i, j), i, j, clusters[i].gen, clusters[j].gen});
        heap.push({attract(j, i), j, i, clusters[j].gen, clusters[i].gen});
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) push_pair(i, j);
    }

    while (!heap.empty()) {
        const Candidate c = heap.top();
        heap.pop();
        LiveCluster& ci = clusters[c.i];
        LiveCluster& cj = clusters[c.j];
        if (!ci.alive || !cj.alive || ci.gen != c.gen_i || cj.gen != c.gen_j) {
            continue;  // stale: one side merged since this entry was pushed
        }
        std::vector<VariableId> merged = scope_union(ci.scope, cj.scope);
        if (domains.log2_space(merged) > h_tau) {
            continue;  // discard this attraction, keep the reverse one
        }
        ci.scope = std::move(merged);
        ci.members.insert(ci.members.end(), cj.members.begin(),
                          cj.members.end());
        ci.mass += cj.mass;
        ci.gen += 1;
        cj.alive = false;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == c.i || !clusters[k].alive) continue;
            push_pair(c.i, k);
        }
    }

    std::vector<std::vector<std::size_t>> groups;
    for (LiveCluster& c : clusters) {
        if (!c.alive) continue;
        std::sort(c.members.begin(), c.members.end());
        groups.push_back(std::move(c.members));
    }
    return groups;
}

SparseFactor merge_cluster(const std::vector<const SparseFactor*>& cluster,
                           TableBudget* budget) {
    require(!cluster.empty(), "merge_cluster needs at least one factor");
    std::vector<std::size_t> order(cluster.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) {
                         return cluster[x]->size() < cluster[y]->size();
                     });
    SparseFactor result = *cluster[order[0]];
    for (std::size_t k = 1; k < order.size(); ++k) {
        result = product(result, *cluster[order[k]], budget);
    }
    return result;
}

std::vector<SparseFactor> absorb_subsumed(std::vector<SparseFactor> factors,
                                          TableBudget* budget) {
    const std::size_t n = factors.size();
    std::vector<bool> alive(n, true);

    // Process narrow scopes first; absorbing into a host never changes the
    // host's scope, so one ascending pass reaches the fixpoint.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) {
                         return factors[x].width() < factors[y].width();
                     });
    for (std::size_t i : order) {
        std::size_t host = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !alive[j]) continue;
            if (!scope_subset(factors[i].scope(), factors[j].scope())) {
                continue;
            }
            if (host == n ||
                factors[j].width() < factors[host].width() ||
                (factors[j].width() == factors[host].width() && j < host)) {
                host = j;
            }
        }
        if (host == n) continue;
        factors[host] = product(factors[host], factors[i], budget);
        alive[i] = false;
    }

    std::vector<SparseFactor> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (alive[i]) out.push_back(std::move(factors[i]));
    }
    return out;
}

}  // namespace pnm
