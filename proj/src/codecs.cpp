#include "pnm/codecs.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

namespace pnm {

namespace {

// ---------------------------------------------------------------------------
// Clause table generation. Every emitter walks the free variables in
// ascending id order with domain values ascending, so rows arrive at the
// FactorBuilder already in canonical lexicographic order.

struct FreeVar {
    VariableId id;
    const std::vector<Value>* domain;
};

bool value_taken(const std::vector<Value>& row, std::size_t upto,
                 const std::vector<Value>& pinned, Value x) {
    for (std::size_t i = 0; i < upto; ++i) {
        if (row[i] == x) return true;
    }
    return std::find(pinned.begin(), pinned.end(), x) != pinned.end();
}

void emit_alldiff(FactorBuilder& out, const std::vector<FreeVar>& vars,
                  const std::vector<Value>& pinned, std::vector<Value>& row,
                  std::size_t i) {
    if (i == vars.size()) {
        out.append(row);
        return;
    }
    for (Value x : *vars[i].domain) {
        if (value_taken(row, i, pinned, x)) continue;
        row[i] = x;
        emit_alldiff(out, vars, pinned, row, i + 1);
    }
}

// Sum with optional pairwise-distinct rule; prunes with suffix bounds on the
// reachable remaining sum.
void emit_sum(FactorBuilder& out, const std::vector<FreeVar>& vars,
              long long total, bool distinct,
              const std::vector<Value>& pinned,
              const std::vector<long long>& min_suffix,
              const std::vector<long long>& max_suffix,
              std::vector<Value>& row, std::size_t i, long long partial) {
    if (partial + min_suffix[i] > total || partial + max_suffix[i] < total) {
        return;
    }
    if (i == vars.size()) {
        out.append(row);
        return;
    }
    for (Value x : *vars[i].domain) {
        if (distinct && value_taken(row, i, pinned, x)) continue;
        row[i] = x;
        emit_sum(out, vars, total, distinct, pinned, min_suffix, max_suffix,
                 row, i + 1, partial + x);
    }
}

// Product cage. Bounds apply only over all-positive domains; otherwise the
// cages are small enough to enumerate plainly.
void emit_mul(FactorBuilder& out, const std::vector<FreeVar>& vars,
              long long target, bool positive,
              const std::vector<long long>& min_suffix,
              const std::vector<long long>& max_suffix,
              std::vector<Value>& row, std::size_t i, long long partial) {
    if (positive &&
        (partial * min_suffix[i] > target || partial * max_suffix[i] < target)) {
        return;
    }
    if (i == vars.size()) {
        if (partial == target) out.append(row);
        return;
    }
    for (Value x : *vars[i].domain) {
        row[i] = x;
        emit_mul(out, vars, target, positive, min_suffix, max_suffix, row,
                 i + 1, partial * x);
    }
}

void emit_count(FactorBuilder& out, const std::vector<FreeVar>& vars,
                long long clue, const std::vector<long long>& min_suffix,
                const std::vector<long long>& max_suffix,
                std::vector<Value>& row, std::size_t i, long long ones) {
    if (ones + min_suffix[i] > clue || ones + max_suffix[i] < clue) return;
    if (i == vars.size()) {
        out.append(row);
        return;
    }
    for (Value x : *vars[i].domain) {
        row[i] = x;
        emit_count(out, vars, clue, min_suffix, max_suffix, row, i + 1,
                   ones + (x == 1));
    }
}

std::vector<FreeVar> sorted_free_vars(const std::vector<VariableId>& ids,
                                      const DomainTable& domains) {
    std::vector<FreeVar> vars;
    vars.reserve(ids.size());
    for (VariableId v : ids) vars.push_back({v, &domains.values(v)});
    std::sort(vars.begin(), vars.end(),
              [](const FreeVar& a, const FreeVar& b) { return a.id < b.id; });
    return vars;
}

std::vector<VariableId> var_ids(const std::vector<FreeVar>& vars) {
    std::vector<VariableId> ids;
    ids.reserve(vars.size());
    for (const FreeVar& v : vars) ids.push_back(v.id);
    return ids;
}

// Suffix aggregates over the free variables' domains: fold(min/max of each
// remaining domain), with suffix[n] = identity.
template <class Fold>
std::vector<long long> suffix_fold(const std::vector<FreeVar>& vars,
                                   long long identity, bool use_max,
                                   Fold fold) {
    std::vector<long long> suffix(vars.size() + 1, identity);
    for (std::size_t i = vars.size(); i-- > 0;) {
        const std::vector<Value>& d = *vars[i].domain;
        const long long pick = use_max ? d.back() : d.front();
        suffix[i] = fold(suffix[i + 1], pick);
    }
    return suffix;
}

SparseFactor encode_table_clause(const Clause& clause,
                                 const TableClause& table,
                                 const DomainTable& domains,
                                 const std::vector<std::optional<Value>>& fixed,
                                 TableBudget* budget) {
    std::vector<std::size_t> free_pos;
    for (std::size_t p = 0; p < clause.scope.size(); ++p) {
        const VariableId v = clause.scope[p];
        if (v >= fixed.size() || !fixed[v]) free_pos.push_back(p);
    }
    std::vector<VariableId> free_scope;
    for (std::size_t p : free_pos) free_scope.push_back(clause.scope[p]);

    std::vector<std::vector<Value>> rows;
    for (const auto& entry : table.entries) {
        bool admissible = true;
        for (std::size_t p = 0; p < clause.scope.size(); ++p) {
            const VariableId v = clause.scope[p];
            const bool pinned = v < fixed.size() && fixed[v].has_value();
            if (pinned ? *fixed[v] != entry[p]
                       : !domains.contains(v, entry[p])) {
                admissible = false;
                break;
            }
        }
        if (!admissible) continue;
        std::vector<Value> row;
        row.reserve(free_pos.size());
        for (std::size_t p : free_pos) row.push_back(entry[p]);
        rows.push_back(std::move(row));
    }
    if (budget) budget->charge(rows.size());
    return SparseFactor::from_rows(std::move(free_scope), std::move(rows));
}

// ---------------------------------------------------------------------------
// Sudoku text format.

std::string cell_name(int r, int c) {
    return "r" + std::to_string(r + 1) + "c" + std::to_string(c + 1);
}

}  // namespace

SparseFactor encode_clause(const Clause& clause, const DomainTable& domains,
                           const std::vector<std::optional<Value>>& fixed,
                           TableBudget* budget) {
    if (const auto* table = std::get_if<TableClause>(&clause.spec)) {
        return encode_table_clause(clause, *table, domains, fixed, budget);
    }

    std::vector<VariableId> free_ids;
    std::vector<Value> pinned_values;
    for (VariableId v : clause.scope) {
        if (v < fixed.size() && fixed[v]) {
            pinned_values.push_back(*fixed[v]);
        } else {
            free_ids.push_back(v);
        }
    }

    if (free_ids.empty()) {
        // Fully pinned: the clause either holds (unit) or cannot (empty).
        VariableId top = 0;
        for (VariableId v : clause.scope) top = std::max(top, v);
        std::vector<Value> assignment(top + 1, 0);
        for (VariableId v : clause.scope) assignment[v] = *fixed[v];
        return clause_satisfied(clause, assignment)
                   ? SparseFactor::unit()
                   : SparseFactor::zero({});
    }

    const std::vector<FreeVar> vars = sorted_free_vars(free_ids, domains);

    // Two equal pinned values defeat a distinctness clause outright; the
    // per-row check below only compares free cells against the pin list.
    const bool needs_distinct =
        std::holds_alternative<AllDiffClause>(clause.spec) ||
        (std::holds_alternative<SumClause>(clause.spec) &&
         std::get<SumClause>(clause.spec).distinct);
    if (needs_distinct && pinned_values.size() > 1) {
        std::vector<Value> sorted = pinned_values;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) !=
            sorted.end()) {
            return SparseFactor::zero(var_ids(vars));
        }
    }

    FactorBuilder out(var_ids(vars), budget);
    std::vector<Value> row(vars.size());

    struct Visitor {
        const std::vector<FreeVar>& vars;
        const std::vector<Value>& pinned;
        FactorBuilder& out;
        std::vector<Value>& row;

        void operator()(const AllDiffClause&) const {
            emit_alldiff(out, vars, pinned, row, 0);
        }
        void operator()(const SumClause& s) const {
            run_sum(s.total, s.distinct);
        }
        void operator()(const CageClause& g) const {
            switch (g.op) {
                case CageOp::Add:
                    run_sum(g.target, false);
                    return;
                case CageOp::Mul: {
                    long long partial = 1;
                    for (Value x : pinned) partial *= x;
                    bool positive = true;
                    for (const FreeVar& v : vars) {
                        positive = positive && v.domain->front() > 0;
                    }
                    positive = positive && partial > 0;
                    // Suffix products are meaningful (and overflow-safe at
                    // puzzle scale) only over all-positive domains.
                    std::vector<long long> mins(vars.size() + 1, 1);
                    std::vector<long long> maxs(vars.size() + 1, 1);
                    if (positive) {
                        mins = suffix_fold(
                            vars, 1, false,
                            [](long long a, long long b) { return a * b; });
                        maxs = suffix_fold(
                            vars, 1, true,
                            [](long long a, long long b) { return a * b; });
                    }
                    emit_mul(out, vars, g.target, positive, mins, maxs, row,
                             0, partial);
                    return;
                }
                case CageOp::Sub: {
                    // Two cells, order-free: |a - b| = target.
                    if (vars.size() == 2) {
                        for (Value x : *vars[0].domain) {
                            for (Value y : *vars[1].domain) {
                                if (std::llabs((long long)x - y) == g.target) {
                                    row[0] = x;
                                    row[1] = y;
                                    out.append(row);
                                }
                            }
                        }
                    } else {
                        const long long p = pinned[0];
                        for (Value x : *vars[0].domain) {
                            if (std::llabs(x - p) == g.target) {
                                row[0] = x;
                                out.append(row);
                            }
                        }
                    }
                    return;
                }
                case CageOp::Div: {
                    // Two cells, order-free: larger = target * smaller.
                    auto holds = [&](long long x, long long y) {
                        return x == g.target * y || y == g.target * x;
                    };
                    if (vars.size() == 2) {
                        for (Value x : *vars[0].domain) {
                            for (Value y : *vars[1].domain) {
                                if (holds(x, y)) {
                                    row[0] = x;
                                    row[1] = y;
                                    out.append(row);
                                }
                            }
                        }
                    } else {
                        const long long p = pinned[0];
                        for (Value x : *vars[0].domain) {
                            if (holds(x, p)) {
                                row[0] = x;
                                out.append(row);
                            }
                        }
                    }
                    return;
                }
            }
        }
        void operator()(const CountClause& k) const {
            long long clue = k.clue;
            for (Value x : pinned) clue -= (x == 1);
            auto mins = suffix_fold(vars, 0, false,
                                    [](long long a, long long b) {
                                        return a + (b == 1);
                                    });
            // Binary domains: the max pick is 1 exactly when 1 is admissible.
            auto maxs = suffix_fold(vars, 0, true,
                                    [](long long a, long long b) {
                                        return a + (b == 1);
                                    });
            emit_count(out, vars, clue, mins, maxs, row, 0, 0);
        }
        void operator()(const TableClause&) const {}  // handled above

        void run_sum(long long total, bool distinct) const {
            for (Value x : pinned) total -= x;
            auto mins = suffix_fold(vars, 0, false,
                                    [](long long a, long long b) {
                                        return a + b;
                                    });
            auto maxs = suffix_fold(vars, 0, true,
                                    [](long long a, long long b) {
                                        return a + b;
                                    });
            emit_sum(out, vars, total, distinct, pinned, mins, maxs, row, 0,
                     0);
        }
    };
    std::visit(Visitor{vars, pinned_values, out, row}, clause.spec);
    return out.finish();
}

namespace {

std::vector<std::optional<Value>> no_pins(const DomainTable& domains) {
    return std::vector<std::optional<Value>>(domains.num_variables());
}

}  // namespace

SparseFactor encode_alldiff(const std::vector<VariableId>& vars,
                            const DomainTable& domains, TableBudget* budget) {
    return encode_clause({vars, AllDiffClause{}}, domains, no_pins(domains),
                         budget);
}

SparseFactor encode_sum_clause(const std::vector<VariableId>& vars,
                               long long total, bool distinct,
                               const DomainTable& domains,
                               TableBudget* budget) {
    return encode_clause({vars, SumClause{total, distinct}}, domains,
                         no_pins(domains), budget);
}

SparseFactor encode_arithmetic_cage(const std::vector<VariableId>& vars,
                                    CageOp op, long long target,
                                    const DomainTable& domains,
                                    TableBudget* budget) {
    return encode_clause({vars, CageClause{op, target}}, domains,
                         no_pins(domains), budget);
}

SparseFactor encode_count_clause(VariableId centre,
                                 const std::vector<VariableId>& neighbours,
                                 long long clue, const DomainTable& domains,
                                 TableBudget* budget) {
    std::vector<VariableId> scope = neighbours;
    scope.push_back(centre);
    std::sort(scope.begin(), scope.end());
    require(std::adjacent_find(scope.begin(), scope.end()) == scope.end(),
            "count clause cells must be distinct");
    return encode_clause({std::move(scope), CountClause{clue}}, domains,
                         no_pins(domains), budget);
}

// ---------------------------------------------------------------------------
// Sudoku text format.

CspInstance parse_sudoku(const std::string& text) {
    std::string payload;
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) payload.push_back(ch);
    }
    int n = 0;
    if (payload.size() == 81) n = 9;
    else if (payload.size() == 16) n = 4;
    else {
        throw ParseError("expected 16 or 81 grid characters, got " +
                         std::to_string(payload.size()));
    }
    const int box = n == 9 ? 3 : 2;

    CspInstance inst;
    std::vector<std::vector<Value>> domains;
    std::vector<Value> full;
    for (int v = 1; v <= n; ++v) full.push_back(Value(v));
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            inst.names.push_back(cell_name(r, c));
            domains.push_back(full);
        }
    }
    inst.domains = DomainTable(std::move(domains));

    for (int i = 0; i < n * n; ++i) {
        const char ch = payload[std::size_t(i)];
        if (ch == '.' || ch == '0') continue;
        if (ch >= '1' && ch <= '0' + n) {
            inst.evidence.emplace_back(VariableId(i), Value(ch - '0'));
        } else {
            throw ParseError(std::string("invalid grid character '") + ch +
                             "' at " + cell_name(i / n, i % n));
        }
    }

    std::vector<std::pair<std::string, std::vector<VariableId>>> units;
    for (int r = 0; r < n; ++r) {
        std::vector<VariableId> scope;
        for (int c = 0; c < n; ++c) scope.push_back(VariableId(r * n + c));
        units.emplace_back("row " + std::to_string(r + 1), std::move(scope));
    }
    for (int c = 0; c < n; ++c) {
        std::vector<VariableId> scope;
        for (int r = 0; r < n; ++r) scope.push_back(VariableId(r * n + c));
        units.emplace_back("column " + std::to_string(c + 1),
                           std::move(scope));
    }
    for (int br = 0; br < n; br += box) {
        for (int bc = 0; bc < n; bc += box) {
            std::vector<VariableId> scope;
            for (int r = br; r < br + box; ++r) {
                for (int c = bc; c < bc + box; ++c) {
                    scope.push_back(VariableId(r * n + c));
                }
            }
            const int box_index = (br / box) * (n / box) + bc / box + 1;
            units.emplace_back("box " + std::to_string(box_index),
                               std::move(scope));
        }
    }

    std::vector<Value> given(inst.num_variables(), 0);
    for (const auto& [v, x] : inst.evidence) given[v] = x;
    for (const auto& [label, scope] : units) {
        std::vector<bool> seen(std::size_t(n) + 1, false);
        for (VariableId v : scope) {
            const Value x = given[v];
            if (x == 0) continue;
            if (seen[std::size_t(x)]) {
                throw ParseError("duplicate given " + std::to_string(x) +
                                 " in " + label);
            }
            seen[std::size_t(x)] = true;
        }
        inst.clauses.push_back({scope, AllDiffClause{}});
    }

    validate_instance(inst);
    return inst;
}

std::vector<CspInstance> parse_sudoku_file(const std::string& text) {
    std::vector<CspInstance> puzzles;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        bool blank = true;
        for (char ch : line) {
            if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
        }
        if (blank) continue;
        try {
            puzzles.push_back(parse_sudoku(line));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    return puzzles;
}

namespace {

/// Grid side length if the instance is shaped like parse_sudoku output.
int sudoku_side(const CspInstance& inst) {
    int n = 0;
    if (inst.num_variables() == 81) n = 9;
    else if (inst.num_variables() == 16) n = 4;
    else return 0;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (inst.names[std::size_t(r * n + c)] != cell_name(r, c)) {
                return 0;
            }
        }
    }
    return n;
}

}  // namespace

std::string format_solution(const CspInstance& inst,
                            const std::vector<Value>& assignment) {
    require(assignment.size() == inst.num_variables(),
            "assignment size must match the instance");
    if (const int n = sudoku_side(inst); n != 0) {
        std::string line(std::size_t(n) * n, '.');
        for (std::size_t i = 0; i < line.size(); ++i) {
            line[i] = char('0' + assignment[i]);
        }
        return line;
    }
    nlohmann::ordered_json cells;
    for (std::size_t v = 0; v < inst.num_variables(); ++v) {
        cells[inst.names[v]] = int(assignment[v]);
    }
    nlohmann::ordered_json doc;
    doc["assignment"] = std::move(cells);
    return doc.dump();
}

// ---------------------------------------------------------------------------
// Generic puzzle document.

namespace {

using nlohmann::json;

Value to_value(long long x, const std::string& where) {
    if (x < std::numeric_limits<Value>::min() ||
        x > std::numeric_limits<Value>::max()) {
        throw ParseError(where + ": value " + std::to_string(x) +
                         " is out of the representable range");
    }
    return Value(x);
}

long long get_int(const json& obj, const char* field,
                  const std::string& where) {
    if (!obj.contains(field)) {
        throw ParseError(where + ": missing field '" + field + "'");
    }
    const json& v = obj.at(field);
    if (!v.is_number_integer()) {
        throw ParseError(where + ": field '" + field +
                         "' must be an integer");
    }
    return v.get<long long>();
}

std::string get_string(const json& obj, const char* field,
                       const std::string& where) {
    if (!obj.contains(field) || !obj.at(field).is_string()) {
        throw ParseError(where + ": missing string field '" +
                         std::string(field) + "'");
    }
    return obj.at(field).get<std::string>();
}

}  // namespace

CspInstance parse_generic(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("document is not valid JSON: ") +
                         e.what());
    }
    if (!doc.is_object()) throw ParseError("top level must be an object");
    if (get_int(doc, "format-version", "document") != 1) {
        throw ParseError("unsupported format-version (expected 1)");
    }
    if (!doc.contains("variables") || !doc.at("variables").is_array()) {
        throw ParseError("'variables' must be an array");
    }

    CspInstance inst;
    std::vector<std::vector<Value>> domains;
    std::map<std::string, VariableId> by_name;
    for (std::size_t i = 0; i < doc.at("variables").size(); ++i) {
        const json& var = doc.at("variables")[i];
        const std::string where = "variable " + std::to_string(i);
        if (!var.is_object()) throw ParseError(where + ": must be an object");
        std::string name = get_string(var, "name", where);
        if (name.empty()) throw ParseError(where + ": name must be non-empty");
        if (by_name.count(name)) {
            throw ParseError(where + ": duplicate variable name '" + name +
                             "'");
        }
        if (!var.contains("domain") || !var.at("domain").is_array()) {
            throw ParseError(where + ": 'domain' must be an array");
        }
        std::vector<Value> dom;
        for (const json& x : var.at("domain")) {
            if (!x.is_number_integer()) {
                throw ParseError(where + ": domain values must be integers");
            }
            dom.push_back(to_value(x.get<long long>(), where));
        }
        by_name.emplace(name, VariableId(inst.names.size()));
        inst.names.push_back(std::move(name));
        domains.push_back(std::move(dom));
    }
    inst.domains = DomainTable(std::move(domains));

    auto resolve = [&](const json& scope_json,
                       const std::string& where) -> std::vector<VariableId> {
        if (!scope_json.is_array()) {
            throw ParseError(where + ": 'scope' must be an array of names");
        }
        std::vector<VariableId> scope;
        for (const json& s : scope_json) {
            if (!s.is_string()) {
                throw ParseError(where + ": scope entries must be names");
            }
            const auto it = by_name.find(s.get<std::string>());
            if (it == by_name.end()) {
                throw ParseError(where + ": unknown variable '" +
                                 s.get<std::string>() + "'");
            }
            scope.push_back(it->second);
        }
        return scope;
    };

    if (doc.contains("clauses")) {
        if (!doc.at("clauses").is_array()) {
            throw ParseError("'clauses' must be an array");
        }
        for (std::size_t i = 0; i < doc.at("clauses").size(); ++i) {
            const json& cl = doc.at("clauses")[i];
            const std::string where = "clause " + std::to_string(i);
            if (!cl.is_object()) {
                throw ParseError(where + ": must be an object");
            }
            const std::string kind = get_string(cl, "kind", where);
            if (!cl.contains("scope")) {
                throw ParseError(where + ": missing field 'scope'");
            }
            Clause clause;
            clause.scope = resolve(cl.at("scope"), where);
            if (kind == "alldiff") {
                clause.spec = AllDiffClause{};
            } else if (kind == "sum") {
                SumClause s;
                s.total = get_int(cl, "total", where);
                if (cl.contains("distinct")) {
                    if (!cl.at("distinct").is_boolean()) {
                        throw ParseError(where +
                                         ": 'distinct' must be a boolean");
                    }
                    s.distinct = cl.at("distinct").get<bool>();
                }
                clause.spec = s;
            } else if (kind == "cage") {
                CageClause g;
                const std::string op = get_string(cl, "op", where);
                if (op == "add") g.op = CageOp::Add;
                else if (op == "sub") g.op = CageOp::Sub;
                else if (op == "mul") g.op = CageOp::Mul;
                else if (op == "div") g.op = CageOp::Div;
                else {
                    throw ParseError(where + ": unknown cage op '" + op +
                                     "'");
                }
                g.target = get_int(cl, "target", where);
                clause.spec = g;
            } else if (kind == "count") {
                clause.spec = CountClause{get_int(cl, "clue", where)};
            } else if (kind == "table") {
                if (!cl.contains("entries") || !cl.at("entries").is_array()) {
                    throw ParseError(where + ": 'entries' must be an array");
                }
                TableClause t;
                for (const json& row_json : cl.at("entries")) {
                    if (!row_json.is_array()) {
                        throw ParseError(where +
                                         ": entries must be arrays of values");
                    }
                    std::vector<Value> row;
                    for (const json& x : row_json) {
                        if (!x.is_number_integer()) {
                            throw ParseError(
                                where + ": entry values must be integers");
                        }
                        row.push_back(to_value(x.get<long long>(), where));
                    }
                    t.entries.push_back(std::move(row));
                }
                clause.spec = std::move(t);
            } else {
                throw ParseError(where + ": unknown clause kind '" + kind +
                                 "'");
            }
            inst.clauses.push_back(std::move(clause));
        }
    }

    if (doc.contains("evidence")) {
        if (!doc.at("evidence").is_object()) {
            throw ParseError("'evidence' must be an object");
        }
        for (const auto& [name, val] : doc.at("evidence").items()) {
            const auto it = by_name.find(name);
            if (it == by_name.end()) {
                throw ParseError("evidence: unknown variable '" + name + "'");
            }
            if (!val.is_number_integer()) {
                throw ParseError("evidence: value for '" + name +
                                 "' must be an integer");
            }
            inst.evidence.emplace_back(
                it->second, to_value(val.get<long long>(), "evidence"));
        }
        std::sort(inst.evidence.begin(), inst.evidence.end());
    }

    validate_instance(inst);
    return inst;
}

std::string serialize_generic(const CspInstance& inst) {
    nlohmann::ordered_json doc;
    doc["format-version"] = 1;

    nlohmann::ordered_json vars = nlohmann::ordered_json::array();
    for (std::size_t v = 0; v < inst.num_variables(); ++v) {
        nlohmann::ordered_json entry;
        entry["name"] = inst.names[v];
        entry["domain"] = inst.domains.values(VariableId(v));
        vars.push_back(std::move(entry));
    }
    doc["variables"] = std::move(vars);

    nlohmann::ordered_json clauses = nlohmann::ordered_json::array();
    for (const Clause& c : inst.clauses) {
        nlohmann::ordered_json entry;
        std::vector<std::string> scope;
        for (VariableId v : c.scope) scope.push_back(inst.names[v]);
        struct Visitor {
            nlohmann::ordered_json& entry;
            void operator()(const AllDiffClause&) const {
                entry["kind"] = "alldiff";
            }
            void operator()(const SumClause& s) const {
                entry["kind"] = "sum";
                entry["total"] = s.total;
                entry["distinct"] = s.distinct;
            }
            void operator()(const CageClause& g) const {
                entry["kind"] = "cage";
                switch (g.op) {
                    case CageOp::Add: entry["op"] = "add"; break;
                    case CageOp::Sub: entry["op"] = "sub"; break;
                    case CageOp::Mul: entry["op"] = "mul"; break;
                    case CageOp::Div: entry["op"] = "div"; break;
                }
                entry["target"] = g.target;
            }
            void operator()(const CountClause& k) const {
                entry["kind"] = "count";
                entry["clue"] = k.clue;
            }
            void operator()(const TableClause& t) const {
                entry["kind"] = "table";
                entry["entries"] = t.entries;
            }
        };
        std::visit(Visitor{entry}, c.spec);
        entry["scope"] = scope;
        clauses.push_back(std::move(entry));
    }
    doc["clauses"] = std::move(clauses);

    nlohmann::ordered_json evidence = nlohmann::ordered_json::object();
    for (const auto& [v, x] : inst.evidence) {
        evidence[inst.names[v]] = int(x);
    }
    doc["evidence"] = std::move(evidence);

    return doc.dump(2) + "\n";
}

}  // namespace pnm
