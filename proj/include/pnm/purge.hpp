#pragma once

#include <cstdint>
#include <vector>

#include "pnm/factor.hpp"
#include "pnm/types.hpp"

namespace pnm {

struct PurgeOutcome {
    Evidence solved;  // variables pinned to their single supported value
    std::vector<std::pair<VariableId, Value>> removed_values;
    std::uint64_t entries_removed = 0;

    bool changed() const {
        return !solved.empty() || !removed_values.empty() ||
               entries_removed != 0;
    }
};

/// Narrows every variable's domain to the values supported by ALL factors
/// containing it, deletes entries that use removed values, and repeats to
/// fixpoint. Factors and domains are updated in place.
/// Throws UnsatisfiableError when a domain empties.
PurgeOutcome reduce_domains(std::vector<SparseFactor>& factors,
                            DomainTable& domains);

/// Finds variables with a single supported value in some factor, records
/// them as solved, observes them in every factor (removing them from all
/// scopes), and repeats to fixpoint. Factors whose scope empties are
/// dropped. Throws UnsatisfiableError when an observation empties a factor.
PurgeOutcome reduce_variables(std::vector<SparseFactor>& factors,
                              DomainTable& domains);

}  // namespace pnm
