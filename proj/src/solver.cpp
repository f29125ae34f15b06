#include "pnm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pnm/codecs.hpp"
#include "pnm/inference.hpp"
#include "pnm/purge.hpp"

namespace pnm {

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Solved: return "solved";
        case Outcome::Unsatisfiable: return "unsatisfiable";
        case Outcome::TableBlowup: return "blowup";
        case Outcome::BudgetExhausted: return "budget";
    }
    return "unknown";
}

void validate_config(const SolverConfig& config) {
    if (!(config.threshold_init_factor > 0.0)) {
        throw std::invalid_argument("threshold init factor must be positive");
    }
    if (config.threshold_growth_bits &&
        !(*config.threshold_growth_bits > 0.0)) {
        throw std::invalid_argument("threshold growth must be positive");
    }
    if (config.max_table_entries == 0) {
        throw std::invalid_argument("table-entry budget must be positive");
    }
    if (config.max_rounds == 0) {
        throw std::invalid_argument("round budget must be positive");
    }
    if (config.messages_per_edge == 0) {
        throw std::invalid_argument("message budget must be positive");
    }
    if (config.enumeration_cap == 0) {
        throw std::invalid_argument("enumeration cap must be positive");
    }
}

double threshold_schedule(std::uint64_t round, const CspInstance& inst,
                          const SolverConfig& config) {
    validate_config(config);
    std::vector<char> pinned(inst.num_variables(), 0);
    for (const auto& [v, x] : inst.evidence) pinned[v] = 1;

    // Base = the largest upper-bound entropy among the initial factors: each
    // clause over its unobserved variables, plus the unary coverage factor
    // of every unobserved variable.
    double base = 0.0;
    for (const Clause& c : inst.clauses) {
        std::vector<VariableId> free_scope;
        for (VariableId v : c.scope) {
            if (!pinned[v]) free_scope.push_back(v);
        }
        base = std::max(base, inst.domains.log2_space(free_scope));
    }
    std::size_t largest_domain = 1;
    for (VariableId v = 0; v < inst.num_variables(); ++v) {
        largest_domain = std::max(largest_domain, inst.domains.size(v));
        if (!pinned[v]) {
            base = std::max(base, std::log2(double(inst.domains.size(v))));
        }
    }

    const double growth = config.threshold_growth_bits.value_or(
        std::max(1.0, std::log2(double(largest_domain))));
    return base * config.threshold_init_factor + double(round) * growth;
}

namespace {

/// Maximum-weight spanning forest over the factors' pairwise scope overlaps
/// (Kruskal, ties to the smallest index pair), sepsets = full intersections.
/// On factors that admit a junction forest this yields one.
std::vector<ClusterEdge> junction_forest_edges(
    const std::vector<SparseFactor>& factors) {
    struct Candidate {
        std::size_t weight, i, j;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        for (std::size_t j = i + 1; j < factors.size(); ++j) {
            const std::size_t w =
                scope_intersection(factors[i].scope(), factors[j].scope())
                    .size();
            if (w > 0) candidates.push_back({w, i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                  if (a.weight != b.weight) return a.weight > b.weight;
                  if (a.i != b.i) return a.i < b.i;
                  return a.j < b.j;
              });

    std::vector<std::size_t> parent(factors.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    std::vector<ClusterEdge> edges;
    for (const Candidate& c : candidates) {
        const std::size_t ri = find(c.i), rj = find(c.j);
        if (ri == rj) continue;
        parent[ri] = rj;
        edges.push_back({c.i, c.j,
                         scope_intersection(factors[c.i].scope(),
                                            factors[c.j].scope())});
    }
    std::sort(edges.begin(), edges.end(),
              [](const ClusterEdge& x, const ClusterEdge& y) {
                  return std::pair(x.a, x.b) < std::pair(y.a, y.b);
              });
    return edges;
}

struct Engine {
    const CspInstance& inst;
    const SolverConfig& config;
    SolveReport rep;
    TableBudget budget;
    DomainTable domains;
    std::vector<std::optional<Value>> fixed;
    std::vector<SparseFactor> factors;

    Engine(const CspInstance& instance, const SolverConfig& cfg)
        : inst(instance),
          config(cfg),
          budget(cfg.max_table_entries),
          domains(instance.domains),
          fixed(instance.num_variables()) {
        rep.num_variables = instance.num_variables();
    }

    void pin(VariableId v, Value x) {
        domains.restrict_to(v, x);
        fixed[v] = x;
        rep.solved.emplace_back(v, x);
    }

    void check_deadline() const {
        if (config.deadline &&
            std::chrono::steady_clock::now() > *config.deadline) {
            throw TimeoutError("wall-clock limit exceeded");
        }
    }

    void checkpoint(SolvePhase phase) const {
        if (config.checkpoint) {
            config.checkpoint(phase, factors, domains, rep.solved);
        }
    }

    void setup() {
        const std::size_t n = inst.num_variables();
        for (VariableId v = 0; v < n; ++v) {
            if (domains.size(v) == 0) {
                throw UnsatisfiableError("variable '" + inst.names[v] +
                                         "' has an empty domain");
            }
        }
        for (const auto& [v, x] : inst.evidence) pin(v, x);
        for (VariableId v = 0; v < n; ++v) {
            if (!fixed[v] && domains.size(v) == 1) {
                pin(v, domains.values(v)[0]);
            }
        }

        for (const Clause& c : inst.clauses) {
            SparseFactor f = encode_clause(c, domains, fixed, &budget);
            if (f.empty()) {
                throw UnsatisfiableError(
                    std::string(clause_kind_name(c)) +
                    " clause admits no assignment under the given values");
            }
            if (f.width() == 0) continue;  // pinned and satisfied
            factors.push_back(std::move(f));
        }

        // Unconstrained variables still need a factor so the residual model
        // covers them: give each a unary all-ones table.
        std::vector<char> covered(n, 0);
        for (const SparseFactor& f : factors) {
            for (VariableId v : f.scope()) covered[v] = 1;
        }
        for (VariableId v = 0; v < n; ++v) {
            if (!fixed[v] && !covered[v]) {
                factors.push_back(
                    SparseFactor::full_support({v}, domains, &budget));
            }
        }
    }

    /// One cluster → merge → graph → propagate → purge pass. Returns true
    /// when the model reached a forest (or pinned everything).
    bool round(std::uint64_t round_index, std::uint64_t effective_round,
               bool* no_progress) {
        const auto t0 = std::chrono::steady_clock::now();
        check_deadline();
        const double h_tau = threshold_schedule(effective_round, inst, config);

        const auto groups =
            cluster_factors(factors, h_tau, config.metric, domains);
        bool merged_any = false;
        std::vector<SparseFactor> merged;
        merged.reserve(groups.size());
        for (const auto& g : groups) {
            if (g.size() == 1) {
                merged.push_back(std::move(factors[g[0]]));
                continue;
            }
            merged_any = true;
            std::vector<const SparseFactor*> parts;
            parts.reserve(g.size());
            for (std::size_t idx : g) parts.push_back(&factors[idx]);
            SparseFactor m = merge_cluster(parts, &budget);
            if (m.empty()) {
                throw UnsatisfiableError("a merged cluster has empty support");
            }
            merged.push_back(std::move(m));
        }
        const std::size_t before_absorb = merged.size();
        merged = absorb_subsumed(std::move(merged), &budget);
        merged_any = merged_any || merged.size() != before_absorb;

        PropagateResult prop{};
        bool forest = true;
        const std::size_t cluster_count = merged.size();
        if (merged.size() > 1) {
            ClusterGraph graph = ltrip(std::move(merged));
            PropagateOptions opts;
            opts.budget = &budget;
            opts.domains = &domains;
            opts.deadline = config.deadline;
            opts.max_messages = config.messages_per_edge * 2 *
                                std::uint64_t(graph.edges().size());
            prop = propagate(graph, opts);
            forest = is_tree(graph);
            factors = graph.take_factors();
        } else {
            factors = std::move(merged);
        }
        checkpoint(SolvePhase::AfterPropagate);

        bool purged_any = false;
        std::uint64_t purge_entries = 0;
        for (;;) {
            PurgeOutcome pd = reduce_domains(factors, domains);
            PurgeOutcome pv = reduce_variables(factors, domains);
            for (const auto& [v, x] : pv.solved) {
                require(!fixed[v], "a pinned variable resurfaced in a scope");
                fixed[v] = x;
                rep.solved.emplace_back(v, x);
            }
            purge_entries += pd.entries_removed + pv.entries_removed;
            if (!pd.changed() && !pv.changed()) break;
            purged_any = true;
        }
        checkpoint(SolvePhase::AfterPurge);

        RoundStats stats;
        stats.round = round_index;
        stats.threshold_bits = h_tau;
        stats.clusters = cluster_count;
        stats.max_table_entries = budget.take_round_peak();
        stats.messages = prop.messages;
        stats.supports_purged = prop.support_removed + purge_entries;
        stats.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        rep.rounds.push_back(stats);

        if (factors.empty()) return true;  // everything pinned
        if (forest) return true;
        *no_progress = !merged_any && !purged_any;
        return false;
    }

    void finalize_success() {
        rep.outcome = Outcome::Solved;
        rep.detail = factors.empty()
                         ? "all variables pinned"
                         : "reached a junction forest of " +
                               std::to_string(factors.size()) + " clusters";
        rep.residual = std::move(factors);
        rep.residual_edges = junction_forest_edges(rep.residual);

        std::vector<char> covered(inst.num_variables(), 0);
        for (const auto& [v, x] : rep.solved) covered[v] = 1;
        for (const SparseFactor& f : rep.residual) {
            for (VariableId v : f.scope()) covered[v] = 1;
        }
        for (std::size_t v = 0; v < covered.size(); ++v) {
            require(covered[v] != 0,
                    "the solved set and residual scopes must cover every "
                    "variable");
        }
    }
};

}  // namespace

SolveReport purge_and_merge(const CspInstance& inst,
                            const SolverConfig& config) {
    validate_config(config);
    validate_instance(inst);

    Engine engine(inst, config);
    try {
        engine.setup();
        std::uint64_t extra = 0;
        bool done = false;
        for (std::uint64_t r = 0; !done; ++r) {
            if (r >= config.max_rounds) {
                engine.rep.outcome = Outcome::BudgetExhausted;
                engine.rep.detail =
                    "no junction forest after " + std::to_string(r) +
                    " rounds";
                break;
            }
            bool no_progress = false;
            done = engine.round(r, r + extra, &no_progress);
            if (no_progress) ++extra;
        }
        if (done) engine.finalize_success();
    } catch (const UnsatisfiableError& e) {
        engine.rep.outcome = Outcome::Unsatisfiable;
        engine.rep.detail = e.what();
        engine.rep.residual.clear();
        engine.rep.residual_edges.clear();
    } catch (const TableBlowupError& e) {
        engine.rep.outcome = Outcome::TableBlowup;
        engine.rep.detail = e.what();
        engine.rep.residual.clear();
        engine.rep.residual_edges.clear();
    } catch (const MessageBudgetError& e) {
        engine.rep.outcome = Outcome::BudgetExhausted;
        engine.rep.detail = e.what();
        engine.rep.residual.clear();
        engine.rep.residual_edges.clear();
    } catch (const TimeoutError& e) {
        engine.rep.outcome = Outcome::BudgetExhausted;
        engine.rep.detail = e.what();
        engine.rep.residual.clear();
        engine.rep.residual_edges.clear();
    }

    engine.rep.peak_table_entries = engine.budget.peak();
    engine.rep.domains = std::move(engine.domains);
    std::sort(engine.rep.solved.begin(), engine.rep.solved.end());
    return std::move(engine.rep);
}

SolutionSet enumerate_solutions(const SolveReport& report,
                                std::uint64_t cap) {
    require(report.outcome == Outcome::Solved,
            "enumeration requires a successful solve");
    require(cap > 0, "enumeration cap must be positive");

    const std::size_t n = report.num_variables;
    SolutionSet out;
    std::vector<Value> assignment(n, 0);
    std::vector<char> assigned(n, 0);
    for (const auto& [v, x] : report.solved) {
        assignment[v] = x;
        assigned[v] = 1;
    }

    if (report.residual.empty()) {
        for (std::size_t v = 0; v < n; ++v) {
            require(assigned[v] != 0, "a pinned-only solve must pin all");
        }
        out.solutions.push_back(assignment);
        return out;
    }

    // Visit clusters component by component, neighbours first, so each new
    // cluster overlaps the assignment built so far wherever possible.
    const std::size_t m = report.residual.size();
    std::vector<std::vector<std::size_t>> adjacent(m);
    for (const ClusterEdge& e : report.residual_edges) {
        adjacent[e.a].push_back(e.b);
        adjacent[e.b].push_back(e.a);
    }
    std::vector<std::size_t> order;
    order.reserve(m);
    std::vector<char> seen(m, 0);
    for (std::size_t s = 0; s < m; ++s) {
        if (seen[s]) continue;
        std::vector<std::size_t> queue{s};
        seen[s] = 1;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const std::size_t c = queue[q];
            order.push_back(c);
            for (std::size_t nb : adjacent[c]) {
                if (!seen[nb]) {
                    seen[nb] = 1;
                    queue.push_back(nb);
                }
            }
        }
    }

    auto walk = [&](auto&& self, std::size_t k) -> bool {
        if (k == order.size()) {
            for (std::size_t v = 0; v < n; ++v) {
                require(assigned[v] != 0,
                        "every variable must be covered at emission");
            }
            if (out.solutions.size() == cap) {
                out.truncated = true;
                return false;
            }
            out.solutions.push_back(assignment);
            return true;
        }
        const SparseFactor& f = report.residual[order[k]];
        const auto& scope = f.scope();
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto row = f.row(i);
            bool consistent = true;
            for (std::size_t p = 0; p < scope.size(); ++p) {
                if (assigned[scope[p]] && assignment[scope[p]] != row[p]) {
                    consistent = false;
                    break;
                }
            }
            if (!consistent) continue;
            std::vector<VariableId> fresh;
            for (std::size_t p = 0; p < scope.size(); ++p) {
                if (!assigned[scope[p]]) {
                    assigned[scope[p]] = 1;
                    assignment[scope[p]] = row[p];
                    fresh.push_back(scope[p]);
                }
            }
            const bool keep_going = self(self, k + 1);
            for (VariableId v : fresh) assigned[v] = 0;
            if (!keep_going) return false;
        }
        return true;
    };
    walk(walk, 0);

    require(!out.solutions.empty(),
            "a successful solve cannot have empty joint support");
    return out;
}

}  // namespace pnm
