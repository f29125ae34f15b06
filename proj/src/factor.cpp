#include "pnm/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pnm {

namespace {

// Lexicographic three-way compare of two rows of equal width.
int compare_rows(const Value* a, const Value* b, std::size_t w) {
    for (std::size_t i = 0; i < w; ++i) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

// Positions of `inner` scope variables inside `outer` (both sorted).
// Contract violation if some variable is missing.
std::vector<std::size_t> positions_in(const std::vector<VariableId>& inner,
                                      const std::vector<VariableId>& outer) {
    std::vector<std::size_t> pos;
    pos.reserve(inner.size());
    std::size_t j = 0;
    for (VariableId v : inner) {
        while (j < outer.size() && outer[j] < v) ++j;
        require(j < outer.size() && outer[j] == v,
                "scope does not contain the requested variable");
        pos.push_back(j);
    }
    return pos;
}

int compare_projected(const Value* a, const Value* b,
                      const std::vector<std::size_t>& pos) {
    for (std::size_t p : pos) {
        if (a[p] != b[p]) return a[p] < b[p] ? -1 : 1;
    }
    return 0;
}

}  // namespace

void contract_violation(const std::string& what) {
    throw std::logic_error("contract violation: " + what);
}

// ---------------------------------------------------------------------------
// DomainTable

DomainTable::DomainTable(std::vector<std::vector<Value>> domains)
    : domains_(std::move(domains)) {
    for (auto& d : domains_) {
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
    }
}

const std::vector<Value>& DomainTable::values(VariableId v) const {
    require(v < domains_.size(), "unknown variable id");
    return domains_[v];
}

bool DomainTable::contains(VariableId v, Value x) const {
    const auto& d = values(v);
    return std::binary_search(d.begin(), d.end(), x);
}

bool DomainTable::remove(VariableId v, Value x) {
    require(v < domains_.size(), "unknown variable id");
    auto& d = domains_[v];
    auto it = std::lower_bound(d.begin(), d.end(), x);
    if (it == d.end() || *it != x) return false;
    d.erase(it);
    if (d.empty()) {
        throw UnsatisfiableError("domain of variable " + std::to_string(v) +
                                 " became empty");
    }
    return true;
}

void DomainTable::restrict_to(VariableId v, Value x) {
    if (!contains(v, x)) {
        throw UnsatisfiableError("value " + std::to_string(x) +
                                 " is not admissible for variable " +
                                 std::to_string(v));
    }
    domains_[v] = {x};
}

double DomainTable::log2_space(const std::vector<VariableId>& scope) const {
    double bits = 0.0;
    for (VariableId v : scope) bits += std::log2(double(size(v)));
    return bits;
}

// ---------------------------------------------------------------------------
// SparseFactor construction

SparseFactor SparseFactor::zero(std::vector<VariableId> scope) {
    SparseFactor f;
    f.scope_ = std::move(scope);
    require(std::is_sorted(f.scope_.begin(), f.scope_.end()) &&
                std::adjacent_find(f.scope_.begin(), f.scope_.end()) ==
                    f.scope_.end(),
            "scope must be strictly ascending");
    return f;
}

SparseFactor SparseFactor::unit(double potential) {
    require(potential > 0.0, "unit potential must be positive");
    SparseFactor f;
    f.pot_.push_back(potential);
    return f;
}

SparseFactor SparseFactor::from_rows(std::vector<VariableId> scope,
                                     std::vector<std::vector<Value>> rows,
                                     std::vector<double> potentials) {
    require(rows.size() == potentials.size(),
            "rows and potentials must have equal length");
    const std::size_t w = scope.size();

    // Column permutation into canonical (ascending id) order.
    std::vector<std::size_t> order(w);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return scope[x] < scope[y]; });
    for (std::size_t i = 1; i < w; ++i) {
        require(scope[order[i - 1]] != scope[order[i]],
                "scope contains a duplicate variable");
    }

    SparseFactor f;
    f.scope_.resize(w);
    for (std::size_t c = 0; c < w; ++c) f.scope_[c] = scope[order[c]];

    std::vector<Value> data;
    std::vector<double> pot;
    data.reserve(rows.size() * w);
    pot.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        require(rows[r].size() == w, "row width must match the scope");
        require(potentials[r] >= 0.0, "potentials must be non-negative");
        if (potentials[r] == 0.0) continue;
        for (std::size_t c = 0; c < w; ++c) data.push_back(rows[r][order[c]]);
        pot.push_back(potentials[r]);
    }

    const std::size_t n = pot.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        int c = compare_rows(data.data() + x * w, data.data() + y * w, w);
        return c != 0 ? c < 0 : x < y;
    });

    f.data_.reserve(data.size());
    f.pot_.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Value* row = data.data() + idx[k] * w;
        if (!f.pot_.empty() &&
            compare_rows(f.data_.data() + (f.pot_.size() - 1) * w, row, w) == 0) {
            f.pot_.back() = std::max(f.pot_.back(), pot[idx[k]]);
            continue;
        }
        f.data_.insert(f.data_.end(), row, row + w);
        f.pot_.push_back(pot[idx[k]]);
    }
    return f;
}

SparseFactor SparseFactor::from_rows(std::vector<VariableId> scope,
                                     std::vector<std::vector<Value>> rows) {
    std::vector<double> pot(rows.size(), 1.0);
    return from_rows(std::move(scope), std::move(rows), std::move(pot));
}

SparseFactor SparseFactor::full_support(std::vector<VariableId> scope,
                                        const DomainTable& domains,
                                        TableBudget* budget) {
    SparseFactor f = zero(std::move(scope));
    const std::size_t w = f.scope_.size();

    std::uint64_t total = 1;
    bool overflow = false;
    for (VariableId v : f.scope_) {
        std::uint64_t s = domains.size(v);
        require(s > 0, "full_support needs non-empty domains");
        if (total > std::numeric_limits<std::uint64_t>::max() / s) {
            overflow = true;
            break;
        }
        total *= s;
    }
    if (budget) budget->charge(overflow ? TableBudget::kUnlimited : total);
    require(!overflow, "full_support table size overflows");

    f.data_.reserve(std::size_t(total) * w);
    f.pot_.assign(std::size_t(total), 1.0);
    std::vector<std::size_t> counter(w, 0);
    for (std::uint64_t k = 0; k < total; ++k) {
        for (std::size_t c = 0; c < w; ++c) {
            f.data_.push_back(domains.values(f.scope_[c])[counter[c]]);
        }
        for (std::size_t c = w; c-- > 0;) {  // odometer, last column fastest
            if (++counter[c] < domains.size(f.scope_[c])) break;
            counter[c] = 0;
        }
    }
    return f;
}

std::optional<std::size_t> SparseFactor::find(std::span<const Value> row) const {
    require(row.size() == width(), "row width must match the scope");
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        int c = compare_rows(data_.data() + mid * width(), row.data(), width());
        if (c < 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < size() &&
        compare_rows(data_.data() + lo * width(), row.data(), width()) == 0) {
        return lo;
    }
    return std::nullopt;
}

std::size_t SparseFactor::scope_position(VariableId v) const {
    auto it = std::lower_bound(scope_.begin(), scope_.end(), v);
    require(it != scope_.end() && *it == v, "variable is not in the scope");
    return std::size_t(it - scope_.begin());
}

bool SparseFactor::scope_contains(VariableId v) const {
    return std::binary_search(scope_.begin(), scope_.end(), v);
}

std::string SparseFactor::to_string() const {
    std::ostringstream os;
    os << "factor over {";
    for (std::size_t i = 0; i < scope_.size(); ++i) {
        os << (i ? "," : "") << scope_[i];
    }
    os << "} with " << size() << " entries";
    if (size() <= 32) {
        for (std::size_t r = 0; r < size(); ++r) {
            os << "\n  (";
            auto t = row(r);
            for (std::size_t c = 0; c < t.size(); ++c) {
                os << (c ? "," : "") << t[c];
            }
            os << ") -> " << pot_[r];
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// FactorBuilder

FactorBuilder::FactorBuilder(std::vector<VariableId> sorted_scope,
                             TableBudget* budget)
    : f_(SparseFactor::zero(std::move(sorted_scope))), budget_(budget) {}

void FactorBuilder::append(std::span<const Value> row, double potential) {
    require(row.size() == f_.width(), "row width must match the scope");
    require(potential > 0.0, "appended potentials must be positive");
    const std::size_t w = f_.width();
    if (!f_.pot_.empty()) {
        require(compare_rows(f_.data_.data() + (f_.pot_.size() - 1) * w,
                             row.data(), w) < 0,
                "rows must arrive in strictly ascending order");
    }
    if (budget_) budget_->charge(f_.pot_.size() + 1);
    f_.data_.insert(f_.data_.end(), row.begin(), row.end());
    f_.pot_.push_back(potential);
}

SparseFactor FactorBuilder::finish() { return std::move(f_); }

// ---------------------------------------------------------------------------
// Scope set algebra

std::vector<VariableId> scope_union(const std::vector<VariableId>& a,
                                    const std::vector<VariableId>& b) {
    std::vector<VariableId> u;
    u.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                   std::back_inserter(u));
    return u;
}

std::vector<VariableId> scope_intersection(const std::vector<VariableId>& a,
                                           const std::vector<VariableId>& b) {
    std::vector<VariableId> s;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(s));
    return s;
}

bool scope_subset(const std::vector<VariableId>& inner,
                  const std::vector<VariableId>& outer) {
    return std::includes(outer.begin(), outer.end(), inner.begin(),
                         inner.end());
}

// ---------------------------------------------------------------------------
// product

SparseFactor product(const SparseFactor& a, const SparseFactor& b,
                     TableBudget* budget) {
    std::vector<VariableId> uscope = scope_union(a.scope(), b.scope());
    std::vector<VariableId> shared = scope_intersection(a.scope(), b.scope());
    const std::size_t wu = uscope.size();

    if (a.empty() || b.empty()) {
        if (budget) budget->charge(0);
        return SparseFactor::zero(std::move(uscope));
    }

    const auto apos = positions_in(shared, a.scope());
    const auto bpos = positions_in(shared, b.scope());

    // Column sources in the output: from a where available, else from b.
    struct Source {
        bool from_a;
        std::size_t pos;
    };
    std::vector<Source> src(wu);
    for (std::size_t c = 0; c < wu; ++c) {
        if (a.scope_contains(uscope[c])) {
            src[c] = {true, a.scope_position(uscope[c])};
        } else {
            src[c] = {false, b.scope_position(uscope[c])};
        }
    }

    // Group b's rows by their shared-variable projection.
    std::vector<std::uint32_t> border(b.size());
    std::iota(border.begin(), border.end(), 0);
    std::sort(border.begin(), border.end(),
              [&](std::uint32_t x, std::uint32_t y) {
                  int c = compare_projected(b.row(x).data(), b.row(y).data(),
                                            bpos);
                  return c != 0 ? c < 0 : x < y;
              });
    std::vector<std::uint32_t> gstart;  // group start offsets, + sentinel
    gstart.push_back(0);
    for (std::uint32_t i = 1; i < b.size(); ++i) {
        if (compare_projected(b.row(border[i - 1]).data(),
                              b.row(border[i]).data(), bpos) != 0) {
            gstart.push_back(i);
        }
    }
    gstart.push_back(std::uint32_t(b.size()));
    const std::size_t ngroups = gstart.size() - 1;

    // Binary search for the group matching an a-row's shared projection.
    auto find_group = [&](const Value* arow) -> std::size_t {
        std::size_t lo = 0, hi = ngroups;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            const Value* brow = b.row(border[gstart[mid]]).data();
            int c = 0;
            for (std::size_t k = 0; k < apos.size() && c == 0; ++k) {
                Value bv = brow[bpos[k]], av = arow[apos[k]];
                c = bv == av ? 0 : (bv < av ? -1 : 1);
            }
            if (c < 0)
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo < ngroups) {
            const Value* brow = b.row(border[gstart[lo]]).data();
            for (std::size_t k = 0; k < apos.size(); ++k) {
                if (brow[bpos[k]] != arow[apos[k]]) return ngroups;
            }
            return lo;
        }
        return ngroups;
    };

    // Exact output size, counted before any allocation.
    std::uint64_t total = 0;
    std::vector<std::size_t> agroup(a.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
        std::size_t g = find_group(a.row(r).data());
        agroup[r] = g;
        if (g < ngroups) total += gstart[g + 1] - gstart[g];
    }
    if (budget) budget->charge(total);

    SparseFactor out = SparseFactor::zero(uscope);
    const bool b_inside_a = scope_subset(b.scope(), a.scope());
    std::vector<Value> odata;
    std::vector<double> opot;
    odata.reserve(std::size_t(total) * wu);
    opot.reserve(std::size_t(total));

    std::vector<Value> tmp(wu);
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (agroup[r] == ngroups) continue;
        const Value* arow = a.row(r).data();
        for (std::size_t c = 0; c < wu; ++c) {
            if (src[c].from_a) tmp[c] = arow[src[c].pos];
        }
        for (std::uint32_t k = gstart[agroup[r]]; k < gstart[agroup[r] + 1];
             ++k) {
            const Value* brow = b.row(border[k]).data();
            for (std::size_t c = 0; c < wu; ++c) {
                if (!src[c].from_a) tmp[c] = brow[src[c].pos];
            }
            odata.insert(odata.end(), tmp.begin(), tmp.end());
            opot.push_back(a.potential(r) * b.potential(border[k]));
        }
    }

    if (b_inside_a) {
        // Output rows are a subsequence of a's rows: already canonical.
        out.data_ = std::move(odata);
        out.pot_ = std::move(opot);
        return out;
    }

    std::vector<std::uint32_t> idx(opot.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t x, std::uint32_t y) {
        return compare_rows(odata.data() + std::size_t(x) * wu,
                            odata.data() + std::size_t(y) * wu, wu) < 0;
    });
    out.data_.resize(odata.size());
    out.pot_.resize(opot.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        std::copy_n(odata.data() + std::size_t(idx[k]) * wu, wu,
                    out.data_.data() + k * wu);
        out.pot_[k] = opot[idx[k]];
    }
    return out;
}

// ---------------------------------------------------------------------------
// max_marginalise

SparseFactor max_marginalise(const SparseFactor& f,
                             std::vector<VariableId> target) {
    std::sort(target.begin(), target.end());
    target.erase(std::unique(target.begin(), target.end()), target.end());
    require(scope_subset(target, f.scope()),
            "marginalisation target must be a subset of the scope");
    const auto pos = positions_in(target, f.scope());
    const std::size_t wt = target.size();

    SparseFactor out = SparseFactor::zero(std::move(target));
    if (f.empty()) return out;

    std::vector<std::uint32_t> idx(f.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t x, std::uint32_t y) {
        int c = compare_projected(f.row(x).data(), f.row(y).data(), pos);
        return c != 0 ? c < 0 : x < y;
    });

    for (std::size_t k = 0; k < idx.size(); ++k) {
        const Value* row = f.row(idx[k]).data();
        if (k > 0 &&
            compare_projected(f.row(idx[k - 1]).data(), row, pos) == 0) {
            auto& top = out.pot_.back();
            top = std::max(top, f.potential(idx[k]));
            continue;
        }
        for (std::size_t p : pos) out.data_.push_back(row[p]);
        out.pot_.push_back(f.potential(idx[k]));
    }
    (void)wt;
    return out;
}

// ---------------------------------------------------------------------------
// observe

SparseFactor observe(const SparseFactor& f, const Evidence& evidence) {
    // (scope position, required value), sorted by position.
    std::vector<std::pair<std::size_t, Value>> fixed;
    for (const auto& [v, x] : evidence) {
        if (f.scope_contains(v)) fixed.emplace_back(f.scope_position(v), x);
    }
    std::sort(fixed.begin(), fixed.end());
    for (std::size_t i = 1; i < fixed.size(); ++i) {
        require(fixed[i - 1].first != fixed[i].first,
                "evidence names a variable twice");
    }
    if (fixed.empty()) return f;

    std::vector<VariableId> oscope;
    std::vector<std::size_t> keep;
    {
        std::size_t j = 0;
        for (std::size_t c = 0; c < f.width(); ++c) {
            if (j < fixed.size() && fixed[j].first == c) {
                ++j;
                continue;
            }
            oscope.push_back(f.scope()[c]);
            keep.push_back(c);
        }
    }

    SparseFactor out = SparseFactor::zero(std::move(oscope));
    for (std::size_t r = 0; r < f.size(); ++r) {
        const Value* row = f.row(r).data();
        bool match = true;
        for (const auto& [p, x] : fixed) {
            if (row[p] != x) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        for (std::size_t p : keep) out.data_.push_back(row[p]);
        out.pot_.push_back(f.potential(r));
    }
    // Dropping columns that are constant over the kept rows preserves the
    // lexicographic order, so `out` is canonical without re-sorting.
    return out;
}

// ---------------------------------------------------------------------------
// divide

SparseFactor divide(const SparseFactor& num, const SparseFactor& den) {
    require(scope_subset(den.scope(), num.scope()),
            "divisor scope must be a subset of the numerator scope");
    const auto pos = positions_in(den.scope(), num.scope());

    SparseFactor out = SparseFactor::zero(num.scope());
    out.data_ = num.data_;
    out.pot_.reserve(num.size());

    std::vector<Value> key(den.width());
    for (std::size_t r = 0; r < num.size(); ++r) {
        const Value* row = num.row(r).data();
        for (std::size_t k = 0; k < pos.size(); ++k) key[k] = row[pos[k]];
        auto hit = den.find(key);
        // Absent entries are zeros: 0/0 is defined as 0, but a stored
        // (non-zero) numerator over a zero denominator is a broken schedule.
        require(hit.has_value(),
                "division of a non-zero entry by a zero denominator");
        out.pot_.push_back(num.potential(r) / den.potential(*hit));
    }
    return out;
}

// ---------------------------------------------------------------------------
// max_normalise / support_divergence / supported_values

SparseFactor max_normalise(const SparseFactor& f) {
    if (f.empty()) return f;
    double m = 0.0;
    for (std::size_t r = 0; r < f.size(); ++r) m = std::max(m, f.potential(r));
    if (m == 1.0) return f;
    SparseFactor out = f;
    for (auto& p : out.pot_) p /= m;
    return out;
}

std::uint64_t support_divergence(const SparseFactor& a,
                                 const SparseFactor& b) {
    require(a.scope() == b.scope(),
            "support divergence needs identical scopes");
    const std::size_t w = a.width();
    std::uint64_t diff = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        int c = compare_rows(a.row(i).data(), b.row(j).data(), w);
        if (c == 0) {
            ++i;
            ++j;
        } else if (c < 0) {
            ++diff;
            ++i;
        } else {
            ++diff;
            ++j;
        }
    }
    diff += (a.size() - i) + (b.size() - j);
    return diff;
}

std::vector<Value> supported_values(const SparseFactor& f, VariableId v) {
    const std::size_t p = f.scope_position(v);
    std::vector<Value> vals;
    for (std::size_t r = 0; r < f.size(); ++r) vals.push_back(f.row(r)[p]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

SparseFactor restrict_variable(const SparseFactor& f, VariableId v,
                               const std::vector<Value>& allowed) {
    const std::size_t p = f.scope_position(v);
    SparseFactor out = SparseFactor::zero(f.scope());
    const std::size_t w = f.width();
    for (std::size_t r = 0; r < f.size(); ++r) {
        const Value* row = f.row(r).data();
        if (!std::binary_search(allowed.begin(), allowed.end(), row[p])) {
            continue;
        }
        out.data_.insert(out.data_.end(), row, row + w);
        out.pot_.push_back(f.potential(r));
    }
    return out;
}

}  // namespace pnm
