#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pnm/cluster_graph.hpp"
#include "pnm/codecs.hpp"
#include "pnm/csp.hpp"
#include "pnm/oracle.hpp"
#include "pnm/solver.hpp"

namespace {

using pnm::CspInstance;
using pnm::Outcome;
using pnm::Value;

struct Options {
    std::string format = "sudoku";
    std::string metric = "gravity";
    double threshold_init = 1.5;
    double threshold_growth = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t max_table_entries = 5'000'000;
    bool all_solutions = false;
    std::uint64_t cap = 0;  // 0 = unlimited
    std::string stats = "none";
    bool dump_graph = false;
    double timeout = 0.0;  // seconds per puzzle, 0 = none
    std::uint64_t seed = 0;  // reserved; the pipeline is deterministic
    std::uint64_t max_nodes = 100'000'000;

    std::vector<std::string> files;
    std::string puzzle_file;
    std::string solution_file;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pnm::ParseError("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<CspInstance> load_instances(const std::string& path,
                                        const std::string& format) {
    const std::string text = read_file(path);
    if (format == "sudoku") {
        auto puzzles = pnm::parse_sudoku_file(text);
        if (puzzles.empty()) {
            throw pnm::ParseError("'" + path + "' contains no puzzles");
        }
        return puzzles;
    }
    return {pnm::parse_generic(text)};
}

pnm::SolverConfig make_config(const Options& opt) {
    pnm::SolverConfig cfg;
    cfg.threshold_init_factor = opt.threshold_init;
    if (!std::isnan(opt.threshold_growth)) {
        cfg.threshold_growth_bits = opt.threshold_growth;
    }
    cfg.max_table_entries = opt.max_table_entries;
    if (opt.metric == "gravity") cfg.metric = pnm::MergeMetric::Gravity;
    else if (opt.metric == "entropy") cfg.metric = pnm::MergeMetric::Entropy;
    else cfg.metric = pnm::MergeMetric::Overlap;
    if (opt.timeout > 0.0) {
        cfg.deadline = std::chrono::steady_clock::now() +
                       std::chrono::duration_cast<
                           std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(opt.timeout));
    }
    return cfg;
}

int severity(Outcome o) {
    switch (o) {
        case Outcome::Solved: return 0;
        case Outcome::Unsatisfiable: return 1;
        case Outcome::TableBlowup:
        case Outcome::BudgetExhausted: return 2;
    }
    return 2;
}

nlohmann::json stats_row(int puzzle_index, const pnm::SolveReport& report,
                         double wall_seconds, std::uint64_t solution_count,
                         bool truncated) {
    nlohmann::json row;
    row["puzzle"] = puzzle_index;
    row["outcome"] = pnm::outcome_name(report.outcome);
    row["wall_time_seconds"] = wall_seconds;
    row["rounds"] = report.rounds.size();
    row["peak_table_entries"] = report.peak_table_entries;
    row["peak_table_bits"] =
        report.peak_table_entries
            ? std::log2(double(report.peak_table_entries))
            : 0.0;
    row["solution_count"] = solution_count;
    row["truncated"] = truncated;
    return row;
}

void dump_residual_graph(const CspInstance& inst,
                         const pnm::SolveReport& report) {
    if (report.outcome != Outcome::Solved || report.residual.empty()) return;
    pnm::ClusterGraph graph(report.residual, report.residual_edges);
    std::cerr << pnm::dump_graph(graph, [&](pnm::VariableId v) {
        return inst.names[v];
    });
}

/// Shared engine for `solve`, `enumerate`, and `bench`.
int run_solver(const Options& opt, bool enumerate_all, bool bench_rows) {
    int worst = 0;
    int index = 0;
    for (const std::string& path : opt.files) {
        for (const CspInstance& inst : load_instances(path, opt.format)) {
            ++index;
            const pnm::SolverConfig cfg = make_config(opt);
            const auto t0 = std::chrono::steady_clock::now();
            const pnm::SolveReport report = pnm::purge_and_merge(inst, cfg);
            const double wall =
                std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();

            std::uint64_t count = 0;
            bool truncated = false;
            if (report.outcome == Outcome::Solved) {
                std::uint64_t cap = 1;
                if (enumerate_all) {
                    cap = opt.cap ? opt.cap : std::uint64_t(-1);
                } else if (bench_rows) {
                    cap = 1;
                }
                const pnm::SolutionSet set =
                    pnm::enumerate_solutions(report, cap);
                count = set.solutions.size();
                truncated = set.truncated;
                if (!bench_rows) {
                    for (const auto& solution : set.solutions) {
                        std::cout << pnm::format_solution(inst, solution)
                                  << "\n";
                    }
                    if (truncated) {
                        std::cerr << "puzzle " << index
                                  << ": output truncated at " << count
                                  << " solutions\n";
                    }
                }
            } else if (!bench_rows) {
                std::cerr << "puzzle " << index << ": "
                          << pnm::outcome_name(report.outcome) << " ("
                          << report.detail << ")\n";
            }

            if (opt.dump_graph) dump_residual_graph(inst, report);
            if (bench_rows || opt.stats == "json") {
                std::cout << stats_row(index, report, wall, count, truncated)
                                 .dump()
                          << "\n";
            }
            worst = std::max(worst, severity(report.outcome));
        }
    }
    return worst;
}

std::vector<Value> parse_grid_line(const std::string& line,
                                   std::size_t cells) {
    std::string payload;
    for (char ch : line) {
        if (!std::isspace(static_cast<unsigned char>(ch))) {
            payload.push_back(ch);
        }
    }
    if (payload.size() != cells) {
        throw pnm::ParseError("expected " + std::to_string(cells) +
                              " cells in the proposed solution, got " +
                              std::to_string(payload.size()));
    }
    std::vector<Value> assignment;
    for (char ch : payload) {
        if (ch < '1' || ch > '9') {
            throw pnm::ParseError(
                std::string("proposed solutions must be fully filled; "
                            "found '") +
                ch + "'");
        }
        assignment.push_back(Value(ch - '0'));
    }
    return assignment;
}

std::vector<Value> parse_assignment_doc(const CspInstance& inst,
                                        const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw pnm::ParseError(
            std::string("solution is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("assignment") ||
        !doc.at("assignment").is_object()) {
        throw pnm::ParseError("solution must be {\"assignment\": {...}}");
    }
    std::vector<Value> assignment(inst.num_variables(), 0);
    std::vector<bool> present(inst.num_variables(), false);
    for (const auto& [name, val] : doc.at("assignment").items()) {
        const auto id = inst.find_variable(name);
        if (!id) {
            throw pnm::ParseError("assignment names unknown variable '" +
                                  name + "'");
        }
        if (!val.is_number_integer()) {
            throw pnm::ParseError("assignment value for '" + name +
                                  "' must be an integer");
        }
        assignment[*id] = Value(val.get<long long>());
        present[*id] = true;
    }
    for (std::size_t v = 0; v < inst.num_variables(); ++v) {
        if (!present[v]) {
            throw pnm::ParseError("assignment is missing variable '" +
                                  inst.names[v] + "'");
        }
    }
    return assignment;
}

int run_verify(const Options& opt) {
    const auto instances = load_instances(opt.puzzle_file, opt.format);
    const std::string solution_text = read_file(opt.solution_file);

    std::vector<std::vector<Value>> proposals;
    if (opt.format == "sudoku") {
        std::istringstream in(solution_text);
        std::string line;
        while (std::getline(in, line)) {
            if (const auto hash = line.find('#'); hash != std::string::npos) {
                line.erase(hash);
            }
            bool blank = true;
            for (char ch : line) {
                if (!std::isspace(static_cast<unsigned char>(ch))) {
                    blank = false;
                }
            }
            if (blank) continue;
            proposals.push_back(
                parse_grid_line(line, instances[0].num_variables()));
        }
    } else {
        proposals.push_back(
            parse_assignment_doc(instances[0], solution_text));
    }
    if (proposals.size() != instances.size()) {
        throw pnm::ParseError(
            "got " + std::to_string(proposals.size()) +
            " proposed solutions for " + std::to_string(instances.size()) +
            " puzzles");
    }

    int worst = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        std::string why;
        if (pnm::verify_solution(instances[i], proposals[i], &why)) {
            std::cout << "puzzle " << (i + 1) << ": valid\n";
        } else {
            std::cout << "puzzle " << (i + 1) << ": invalid: " << why << "\n";
            worst = 1;
        }
    }
    return worst;
}

int run_oracle(const Options& opt) {
    int worst = 0;
    int index = 0;
    for (const std::string& path : opt.files) {
        for (const CspInstance& inst : load_instances(path, opt.format)) {
            ++index;
            pnm::SearchBudget budget;
            budget.max_nodes = opt.max_nodes;
            if (opt.cap) budget.max_solutions = opt.cap;
            const pnm::OracleResult result =
                pnm::brute_force_solutions(inst, budget);
            for (const auto& solution : result.solutions) {
                std::cout << pnm::format_solution(inst, solution) << "\n";
            }
            std::cerr << "puzzle " << index << ": "
                      << result.solutions.size() << " solutions, "
                      << result.nodes << " nodes\n";
            if (result.budget_exceeded) {
                std::cerr << "puzzle " << index << ": search budget exceeded\n";
                worst = std::max(worst, 2);
            } else if (result.solutions.empty()) {
                worst = std::max(worst, 1);
            }
        }
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Sparse-table constraint solver: compiles puzzle clauses to sparse "
        "factors and alternates belief propagation with factor merging"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", opt.format, "Input format")
            ->check(CLI::IsMember({"sudoku", "generic"}));
        sub->add_option("--metric", opt.metric, "Merge attraction metric")
            ->check(CLI::IsMember({"gravity", "entropy", "overlap"}));
        sub->add_option("--threshold-init", opt.threshold_init,
                        "Round-0 threshold factor");
        sub->add_option("--threshold-growth", opt.threshold_growth,
                        "Threshold growth per round in bits (default: log2 "
                        "of the largest domain)");
        sub->add_option("--max-table-entries", opt.max_table_entries,
                        "Entry budget for any single table");
        sub->add_flag("--all-solutions", opt.all_solutions,
                      "Enumerate every solution");
        sub->add_option("--cap", opt.cap,
                        "Stop after this many solutions (0 = unlimited)");
        sub->add_option("--stats", opt.stats, "Per-puzzle stats output")
            ->check(CLI::IsMember({"json", "none"}));
        sub->add_flag("--dump-graph", opt.dump_graph,
                      "Print the residual cluster graph to stderr");
        sub->add_option("--timeout", opt.timeout,
                        "Per-puzzle wall-clock limit in seconds");
        sub->add_option("--seed", opt.seed,
                        "Reserved; the pipeline is deterministic");
    };

    CLI::App* solve = app.add_subcommand("solve", "Solve puzzles");
    solve->add_option("files", opt.files, "Puzzle files")
        ->required()
        ->check(CLI::ExistingFile);
    add_common(solve);

    CLI::App* enumerate =
        app.add_subcommand("enumerate", "List every solution");
    enumerate->add_option("files", opt.files, "Puzzle files")
        ->required()
        ->check(CLI::ExistingFile);
    add_common(enumerate);

    CLI::App* verify =
        app.add_subcommand("verify", "Check proposed solutions");
    verify->add_option("puzzle", opt.puzzle_file, "Puzzle file")
        ->required()
        ->check(CLI::ExistingFile);
    verify->add_option("solution", opt.solution_file,
                       "Proposed solution file")
        ->required()
        ->check(CLI::ExistingFile);
    add_common(verify);

    CLI::App* bench = app.add_subcommand(
        "bench", "Solve a corpus and emit one stats row per puzzle");
    bench->add_option("files", opt.files, "Puzzle files")
        ->required()
        ->check(CLI::ExistingFile);
    add_common(bench);

    CLI::App* oracle = app.add_subcommand(
        "oracle", "Enumerate solutions by brute-force search");
    oracle->add_option("files", opt.files, "Puzzle files")
        ->required()
        ->check(CLI::ExistingFile);
    add_common(oracle);
    oracle->add_option("--max-nodes", opt.max_nodes,
                       "Search-node budget for the brute-force enumerator");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        if (solve->parsed()) {
            return run_solver(opt, opt.all_solutions, false);
        }
        if (enumerate->parsed()) {
            return run_solver(opt, true, false);
        }
        if (verify->parsed()) {
            return run_verify(opt);
        }
        if (bench->parsed()) {
            return run_solver(opt, false, true);
        }
        if (oracle->parsed()) {
            return run_oracle(opt);
        }
    } catch (const pnm::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
