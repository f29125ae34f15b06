// Drives the installed command-line binary end to end: golden stats schema,
// the solve -> verify closed loop, and the documented exit codes. The
// binary's path arrives in PNM_CLI (set by ctest); common build locations
// are tried as a fallback so the test binary also runs by hand.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

std::string cli_binary() {
    if (const char* env = std::getenv("PNM_CLI")) return env;
    for (const char* guess :
         {"./tools/pnm", "../tools/pnm", "build/tools/pnm"}) {
        if (std::ifstream(guess).good()) return guess;
    }
    return {};
}

std::string fixture(const std::string& name) {
    return std::string(PNM_FIXTURE_DIR) + "/" + name;
}

struct RunResult {
    int code = -1;
    std::string output;  // stdout and stderr combined
};

RunResult run(const std::string& args) {
    const std::string binary = cli_binary();
    REQUIRE_MESSAGE(!binary.empty(),
                    "PNM_CLI is unset and no built binary was found");
    FILE* pipe = popen(("\"" + binary + "\" " + args + " 2>&1").c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) {
        result.output.append(buf, n);
        if (feof(pipe)) break;
    }
    const int status = pclose(pipe);
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    REQUIRE(out.good());
    out << text;
}

}  // namespace

TEST_CASE("stats rows keep the documented schema") {
    const RunResult r =
        run("solve --format generic --stats json " + fixture("dice_sum10.json"));
    REQUIRE(r.code == 0);

    // The last line is the stats row; the first is the solution.
    std::istringstream lines(r.output);
    std::string line, row_text;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.front() == '{' &&
            line.find("\"puzzle\"") != std::string::npos) {
            row_text = line;
        }
    }
    REQUIRE_FALSE(row_text.empty());
    const nlohmann::json row = nlohmann::json::parse(row_text);

    const std::set<std::string> expected = {
        "outcome",        "peak_table_bits", "peak_table_entries",
        "puzzle",         "rounds",          "solution_count",
        "truncated",      "wall_time_seconds"};
    std::set<std::string> got;
    for (const auto& [key, value] : row.items()) got.insert(key);
    CHECK(got == expected);

    CHECK(row.at("puzzle") == 1);
    CHECK(row.at("outcome") == "solved");
    CHECK(row.at("rounds").is_number_unsigned());
    CHECK(row.at("solution_count").is_number_unsigned());
    CHECK(row.at("truncated").is_boolean());
    CHECK(row.at("wall_time_seconds").is_number());

    const double entries = row.at("peak_table_entries");
    REQUIRE(entries > 0);
    CHECK(row.at("peak_table_bits").get<double>() ==
          doctest::Approx(std::log2(entries)));
}

TEST_CASE("every grid printed by solve passes verify") {
    const std::string puzzles = fixture("sudoku4_unique5.sdk");
    const RunResult solved = run("solve --format sudoku " + puzzles);
    REQUIRE(solved.code == 0);

    write_file("cli_scratch_solutions.txt", solved.output);
    const RunResult checked =
        run("verify --format sudoku " + puzzles + " cli_scratch_solutions.txt");
    CHECK(checked.code == 0);
    std::size_t valid_lines = 0;
    std::istringstream lines(checked.output);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find(": valid") != std::string::npos) ++valid_lines;
    }
    CHECK(valid_lines == 5);
}

TEST_CASE("exit codes separate unsatisfiable, blow-up, and usage errors") {
    SUBCASE("a contradictory puzzle exits 1") {
        // Row 1 needs its 4 in the last cell, but that box already has one.
        write_file("cli_scratch_unsat.sdk", "123....4........\n");
        const RunResult r = run("solve --format sudoku cli_scratch_unsat.sdk");
        CHECK(r.code == 1);
        CHECK(r.output.find("unsatisfiable") != std::string::npos);
    }
    SUBCASE("a strangled table budget exits 2") {
        const RunResult r =
            run("solve --format generic --max-table-entries 100000 " +
                fixture("clique12.json"));
        CHECK(r.code == 2);
        CHECK(r.output.find("blowup") != std::string::npos);
    }
    SUBCASE("a malformed puzzle file exits 3") {
        write_file("cli_scratch_short.sdk", "1234\n");
        const RunResult r = run("solve --format sudoku cli_scratch_short.sdk");
        CHECK(r.code == 3);
    }
    SUBCASE("an unknown flag exits 3") {
        const RunResult r = run("solve --no-such-flag x.sdk");
        CHECK(r.code == 3);
    }
}

TEST_CASE("enumerate lists every solution of a multi-solution instance") {
    const RunResult r =
        run("enumerate --format generic " + fixture("dice_sum10.json"));
    REQUIRE(r.code == 0);
    std::size_t rows = 0;
    std::istringstream lines(r.output);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find("assignment") != std::string::npos) ++rows;
    }
    CHECK(rows == 3);
}
