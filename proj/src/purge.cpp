#include "pnm/purge.hpp"

#include <algorithm>
#include <map>

namespace pnm {

PurgeOutcome reduce_domains(std::vector<SparseFactor>& factors,
                            DomainTable& domains) {
    PurgeOutcome out;
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<VariableId, std::vector<std::size_t>> holders;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            for (VariableId v : factors[i].scope()) holders[v].push_back(i);
        }
        for (const auto& [var, held] : holders) {
            // New domain: values supported by every factor containing var.
            std::vector<Value> supported = domains.values(var);
            for (std::size_t i : held) {
                std::vector<Value> vals = supported_values(factors[i], var);
                std::vector<Value> kept;
                std::set_intersection(supported.begin(), supported.end(),
                                      vals.begin(), vals.end(),
                                      std::back_inserter(kept));
                supported = std::move(kept);
                if (supported.empty()) break;
            }
            if (supported.size() == domains.size(var)) continue;
            if (supported.empty()) {
                throw UnsatisfiableError("no value of variable " +
                                         std::to_string(var) +
                                         " is supported by every factor");
            }
            // Apply: shrink the domain, then drop entries using removed
            // values from every factor containing var.
            std::vector<Value> to_remove;
            for (Value x : domains.values(var)) {
                if (!std::binary_search(supported.begin(), supported.end(),
                                        x)) {
                    to_remove.push_back(x);
                }
            }
            for (Value x : to_remove) {
                out.removed_values.emplace_back(var, x);
                domains.remove(var, x);
            }
            for (std::size_t i : held) {
                SparseFactor reduced =
                    restrict_variable(factors[i], var, supported);
                out.entries_removed += factors[i].size() - reduced.size();
                if (reduced.empty()) {
                    throw UnsatisfiableError(
                        "a factor emptied while pruning variable " +
                        std::to_string(var));
                }
                factors[i] = std::move(reduced);
            }
            changed = true;
        }
    }
    return out;
}

PurgeOutcome reduce_variables(std::vector<SparseFactor>& factors,
                              DomainTable& domains) {
    PurgeOutcome out;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < factors.size() && !changed; ++i) {
            for (VariableId v : factors[i].scope()) {
                std::vector<Value> vals = supported_values(factors[i], v);
                if (vals.size() != 1) continue;
                const Value x = vals.front();
                out.solved.emplace_back(v, x);
                domains.restrict_to(v, x);
                const Evidence single{{v, x}};
                for (SparseFactor& f : factors) {
                    if (!f.scope_contains(v)) continue;
                    SparseFactor reduced = observe(f, single);
                    out.entries_removed += f.size() - reduced.size();
                    if (reduced.empty()) {
                        throw UnsatisfiableError(
                            "observing variable " + std::to_string(v) +
                            " = " + std::to_string(x) +
                            " emptied a factor");
                    }
                    f = std::move(reduced);
                }
                changed = true;
                break;
            }
        }
        // Fully observed factors reduce to the unit table; drop them.
        std::erase_if(factors, [](const SparseFactor& f) {
            return f.width() == 0 && !f.empty();
        });
    }
    return out;
}

}  // namespace pnm
