#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pnm/cluster_graph.hpp"
#include "pnm/types.hpp"

namespace pnm {

/// Stored sepset beliefs, one per undirected edge. An unset entry stands for
/// the initial all-ones table over the sepset's full domain product; it is
/// never materialised because dividing by it is the identity.
struct SepsetState {
    std::vector<std::optional<SparseFactor>> belief;  // by edge index

    static SepsetState fresh(const ClusterGraph& g) {
        return SepsetState{std::vector<std::optional<SparseFactor>>(
            g.edges().size())};
    }
};

struct MessageEvent {
    std::size_t from = 0, to = 0;
    std::uint64_t deviation = 0;
    std::uint64_t total_entries = 0;  // Σ cluster belief sizes after this message
};

struct PropagateOptions {
    /// 0 means the default of 50 messages per directed edge.
    std::uint64_t max_messages = 0;
    TableBudget* budget = nullptr;
    const DomainTable* domains = nullptr;  // required: sizes virgin sepsets
    std::optional<std::chrono::steady_clock::time_point> deadline;
    /// Test/diagnostic hook, called after every message actually computed.
    std::function<void(const MessageEvent&)> on_message;
};

struct PropagateResult {
    std::uint64_t messages = 0;
    std::uint64_t support_removed = 0;  // belief entries dropped in total
};

struct MessageOutcome {
    std::uint64_t deviation = 0;
    bool belief_changed = false;
};

/// One Lauritzen–Spiegelhalter update across edge `e` from endpoint a (when
/// `forward`) or b: the new sepset belief is the sender's max-marginal on
/// the sepset; the receiver multiplies in new/old. Receiver support never
/// grows. Throws UnsatisfiableError when the receiver's belief empties.
MessageOutcome pass_message(ClusterGraph& g, SepsetState& sepsets,
                            std::size_t edge, bool forward,
                            const DomainTable& domains,
                            TableBudget* budget = nullptr);

/// Runs messages to support-stability convergence under residual priority
/// scheduling: directed edges queue at max priority initially, re-queue with
/// the triggering deviation when their sender's belief changes, and the run
/// converges when the queue drains (every reachable message has deviation
/// zero). Cluster factors are updated in place to the calibrated beliefs.
PropagateResult propagate(ClusterGraph& g, const PropagateOptions& options);

}  // namespace pnm
