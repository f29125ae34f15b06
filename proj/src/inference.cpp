#include "pnm/inference.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "pnm/factor.hpp"

namespace pnm {

namespace {

constexpr std::uint64_t kInfinitePriority =
    std::numeric_limits<std::uint64_t>::max();

// Saturating product of the sepset's domain sizes: the size of the implicit
// all-ones initial belief. Only used as a deviation against the first
// message, so saturation is harmless.
std::uint64_t full_sepset_size(const std::vector<VariableId>& sepset,
                               const DomainTable& domains) {
    std::uint64_t total = 1;
    for (VariableId v : sepset) {
        std::uint64_t s = domains.size(v);
        if (s != 0 && total > kInfinitePriority / s) return kInfinitePriority;
        total *= s;
    }
    return total;
}

// Directed-edge schedule: highest priority first, lowest index on ties.
// Every directed edge appears at most once.
class ScheduleQueue {
public:
    explicit ScheduleQueue(std::size_t directed_edges)
        : priority_(directed_edges, 0), queued_(directed_edges, false) {}

    void push_max(std::size_t de, std::uint64_t priority) {
        if (queued_[de]) {
            if (priority <= priority_[de]) return;
            entries_.erase({priority_[de], de});
        }
        priority_[de] = priority;
        queued_[de] = true;
        entries_.insert({priority, de});
    }

    bool empty() const { return entries_.empty(); }

    std::size_t pop() {
        auto it = entries_.begin();
        std::size_t de = it->second;
        entries_.erase(it);
        queued_[de] = false;
        return de;
    }

    std::uint64_t last_priority(std::size_t de) const { return priority_[de]; }

private:
    struct Order {
        bool operator()(const std::pair<std::uint64_t, std::size_t>& x,
                        const std::pair<std::uint64_t, std::size_t>& y) const {
            if (x.first != y.first) return x.first > y.first;
            return x.second < y.second;
        }
    };
    std::set<std::pair<std::uint64_t, std::size_t>, Order> entries_;
    std::vector<std::uint64_t> priority_;
    std::vector<bool> queued_;
};

}  // namespace

MessageOutcome pass_message(ClusterGraph& g, SepsetState& sepsets,
                            std::size_t edge, bool forward,
                            const DomainTable& domains, TableBudget* budget) {
    const ClusterEdge& e = g.edges()[edge];
    const std::size_t from = forward ? e.a : e.b;
    const std::size_t to = forward ? e.b : e.a;

    SparseFactor new_sep = max_marginalise(g.factor(from), e.sepset);
    std::optional<SparseFactor>& old_sep = sepsets.belief[edge];

    MessageOutcome out;
    if (old_sep) {
        out.deviation = support_divergence(new_sep, *old_sep);
    } else {
        // Against the implicit all-ones belief the divergence is the number
        // of full-space tuples the message rules out.
        out.deviation =
            full_sepset_size(e.sepset, domains) - std::uint64_t(new_sep.size());
    }

    if (out.deviation != 0) {
        SparseFactor quotient = old_sep ? divide(new_sep, *old_sep) : new_sep;
        SparseFactor updated =
            max_normalise(product(g.factor(to), quotient, budget));
        if (updated.empty()) {
            throw UnsatisfiableError(
                "belief of cluster " + std::to_string(to) +
                " emptied while absorbing a message");
        }
        // Support stability is what convergence tracks, so only a support
        // change counts as a receiver update.
        out.belief_changed = support_divergence(updated, g.factor(to)) != 0;
        if (out.belief_changed) g.factor(to) = std::move(updated);
    }
    old_sep = std::move(new_sep);
    return out;
}

PropagateResult propagate(ClusterGraph& g, const PropagateOptions& options) {
    require(options.domains != nullptr, "propagate needs the domain table");
    const std::size_t ne = g.edges().size();
    const std::size_t nd = 2 * ne;  // directed edge de: edge de/2, forward de%2==0
    const std::uint64_t max_messages =
        options.max_messages ? options.max_messages : 50 * std::uint64_t(nd);

    SepsetState sepsets = SepsetState::fresh(g);
    ScheduleQueue queue(nd);
    std::vector<std::uint64_t> version(g.size(), 1);
    std::vector<std::uint64_t> last_sent(nd, 0);  // 0 = never sent

    for (std::size_t de = 0; de < nd; ++de) queue.push_max(de, kInfinitePriority);

    std::uint64_t total_entries = 0;
    for (std::size_t i = 0; i < g.size(); ++i) total_entries += g.factor(i).size();

    PropagateResult result;
    while (!queue.empty()) {
        const std::size_t de = queue.pop();
        const std::size_t edge = de / 2;
        const bool forward = de % 2 == 0;
        const std::size_t from = forward ? g.edges()[edge].a : g.edges()[edge].b;
        const std::size_t to = forward ? g.edges()[edge].b : g.edges()[edge].a;

        // The message depends only on the sender's belief; if that has not
        // changed since this edge last fired, the message is unchanged.
        if (last_sent[de] == version[from]) continue;

        if (options.deadline &&
            std::chrono::steady_clock::now() > *options.deadline) {
            throw TimeoutError("propagation passed the wall-clock deadline");
        }
        if (++result.messages > max_messages) {
            std::ostringstream os;
            os << "propagation exceeded its budget of " << max_messages
               << " messages; last deviations per directed edge:";
            for (std::size_t d = 0; d < nd; ++d) {
                os << " " << queue.last_priority(d);
            }
            throw MessageBudgetError(os.str());
        }

        const std::uint64_t before = g.factor(to).size();
        MessageOutcome outcome =
            pass_message(g, sepsets, edge, forward, *options.domains,
                         options.budget);
        last_sent[de] = version[from];

        if (outcome.belief_changed) {
            result.support_removed += before - g.factor(to).size();
            total_entries -= before - g.factor(to).size();
            version[to] += 1;
            for (std::size_t ie : g.incident(to)) {
                const bool out_forward = g.edges()[ie].a == to;
                queue.push_max(2 * ie + (out_forward ? 0 : 1),
                               outcome.deviation);
            }
        }
        if (options.on_message) {
            options.on_message(
                {from, to, outcome.deviation, total_entries});
        }
    }
    return result;
}

}  // namespace pnm
