#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_runner.hpp"

using namespace pmarket::testing;
using nlohmann::json;

namespace {

std::vector<double> numbers(const json& array) { return array.get<std::vector<double>>(); }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        std::vector<std::string> cells;
        std::istringstream fields(line);
        for (std::string cell; std::getline(fields, cell, ',');) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

// Runs a command twice, requires byte-identical output, and compares the
// output with its golden file.
RunResult run_stable(const std::string& args, const std::string& golden) {
    const auto first = run_cli(args);
    const auto second = run_cli(args);
    CHECK(first.out == second.out);
    CHECK(first.exit_code == second.exit_code);
    CHECK(first.out == read_file(data_file("golden/" + golden)));
    return first;
}

}  // namespace

TEST_CASE("clear: two-agent log market clears at the weighted average") {
    const auto r = run_stable("clear log2.json", "clear_log2.json");
    CHECK(r.exit_code == 0);
    const auto rec = json::parse(r.out);
    CHECK(rec["status"] == "converged");
    CHECK(rec["method"] == "analytic");
    const auto c = numbers(rec["prices"]);
    CHECK(c[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("clear: a lone agent prices at its own belief") {
    const auto r = run_stable("clear single.json", "clear_single.json");
    CHECK(r.exit_code == 0);
    const auto c = numbers(json::parse(r.out)["prices"]);
    CHECK(c == std::vector<double>{0.25, 0.5, 0.25});
}

TEST_CASE("clear: constant bettors clear at the wealth-weighted mean") {
    const auto r = run_stable("clear bets.json", "clear_bets.json");
    CHECK(r.exit_code == 0);
    const auto c = numbers(json::parse(r.out)["prices"]);
    CHECK(c[0] == doctest::Approx((3 * 0.5 + 0.1) / 4).epsilon(1e-12));
    CHECK(c[2] == doctest::Approx((3 * 0.2 + 0.6) / 4).epsilon(1e-12));
}

TEST_CASE("clear: marginal agents") {
    const auto r = run_cli("clear marginal.json");
    CHECK(r.exit_code == 0);
    const auto c = numbers(json::parse(r.out)["prices"]);
    // P(rain = 0) is the wealth-weighted mean of 0.3 and 0.7.
    CHECK(c[0] + c[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("clear: malformed belief names the field and exits 2") {
    const auto r = run_cli("clear malformed.json");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("agents[0].belief.table[1]") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("clear: non-convergence exits 3 with the best iterate") {
    const auto r = run_cli("clear asym3.json --max-iter 3");
    CHECK(r.exit_code == 3);
    const auto rec = json::parse(r.out);
    CHECK(rec["status"] == "not_converged");
    CHECK(rec["iterations"] == 3);
    const auto c = numbers(rec["prices"]);
    CHECK(std::abs(c[0] + c[1] + c[2] - 1.0) < 1e-9);
}

TEST_CASE("clear: command-line errors exit 2") {
    CHECK(run_cli("clear missing.json").exit_code == 2);
    CHECK(run_cli("clear log2.json --bogus").exit_code == 2);
    CHECK(run_cli("clear log2.json --damping 0").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);
}

TEST_CASE("clear: --out writes the record to a file") {
    const auto path = std::filesystem::temp_directory_path() / "pmarket-cli-out.json";
    const auto r = run_cli("clear log2.json --out '" + path.string() + "'");
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    CHECK(read_file(path) == read_file(data_file("golden/clear_log2.json")));
    std::filesystem::remove(path);
}

TEST_CASE("train: online updates on a repeated instance reach the posterior") {
    const auto r = run_stable("train train_market.json repeat.jsonl", "train_online.json");
    CHECK(r.exit_code == 0);
    const auto rec = json::parse(r.out);
    const auto w = numbers(rec["wealths"]);
    CHECK(w[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(rec["instances"] == 2);
}

TEST_CASE("train: batch updates price every instance at the initial wealths") {
    const auto r = run_stable("train train_market.json mixed_labels.jsonl --mode batch", "train_batch.json");
    CHECK(r.exit_code == 0);
    const auto w = numbers(json::parse(r.out)["wealths"]);
    CHECK(w[0] == doctest::Approx(0.25 * (0.8 / 0.6 + 0.2 / 0.4)).epsilon(1e-11));
    CHECK(w[1] == doctest::Approx(0.25 * (0.4 / 0.6 + 0.6 / 0.4)).epsilon(1e-11));
}

TEST_CASE("train: an empty dataset leaves wealths unchanged") {
    const auto r = run_stable("train train_market.json empty.jsonl", "train_empty.json");
    CHECK(r.exit_code == 0);
    CHECK(numbers(json::parse(r.out)["wealths"]) == std::vector<double>{0.5, 0.5});
}

TEST_CASE("train: trace lists every step and agent") {
    const auto r = run_stable("train train_market.json repeat.jsonl --trace", "train_online_trace.csv");
    CHECK(r.exit_code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 7);
    CHECK(rows[0] == std::vector<std::string>{"step", "agent", "wealth", "price_at_label"});
    CHECK(rows[1] == std::vector<std::string>{"0", "A", "0.5", ""});
    CHECK(std::stod(rows[3][2]) == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
    CHECK(std::stod(rows[3][3]) == doctest::Approx(0.6).epsilon(1e-11));
    CHECK(std::stod(rows[5][3]) == doctest::Approx(2.0 / 3.0).epsilon(1e-11));

    const auto batch = run_stable("train train_market.json mixed_labels.jsonl --mode batch --trace",
                                  "train_batch_trace.csv");
    CHECK(batch.exit_code == 0);
    const auto last = csv_rows(batch.out).back();
    CHECK(std::stod(last[2]) == doctest::Approx(0.25 * (0.4 / 0.6 + 0.6 / 0.4)).epsilon(1e-11));
}

TEST_CASE("train: error exits") {
    const auto degenerate = run_cli("train train_market.json impossible.jsonl");
    CHECK(degenerate.exit_code == 3);
    CHECK(degenerate.err.find("step 2") != std::string::npos);

    const auto short_row = run_cli("train train_market.json short_row.jsonl");
    CHECK(short_row.exit_code == 2);
    CHECK(short_row.err.find("line 2") != std::string::npos);

    const auto exp = run_cli("train exp2.json repeat.jsonl");
    CHECK(exp.exit_code == 2);
    CHECK(exp.err.find("training undefined for behavior") != std::string::npos);

    CHECK(run_cli("train train_market.json repeat.jsonl --mode sideways").exit_code == 2);
}

TEST_CASE("compare: matching pools have no gap") {
    const auto log = run_stable("compare log2.json", "compare_log2.json");
    CHECK(log.exit_code == 0);
    CHECK(json::parse(log.out)["gap"].get<double>() < 1e-9);

    const auto exp = run_stable("compare exp2.json --oracle product", "compare_exp2_product.json");
    CHECK(exp.exit_code == 0);
    const auto rec = json::parse(exp.out);
    CHECK(rec["gap"].get<double>() < 1e-9);
    const double a = std::sqrt(0.8 * 0.4), b = std::sqrt(0.2 * 0.6);
    CHECK(numbers(rec["oracle_prices"])[0] == doctest::Approx(a / (a + b)).epsilon(1e-11));
}

TEST_CASE("compare: ineligible pairings report the gap and exit 2") {
    const auto r = run_cli("compare log2.json --oracle product");
    CHECK(r.exit_code == 2);
    const auto rec = json::parse(r.out);
    CHECK(rec["eligible"] == false);
    CHECK(rec["gap"].get<double>() > 1e-3);

    CHECK(run_cli("compare exp2.json").exit_code == 2);
    CHECK(run_cli("compare marginal.json").exit_code == 2);
    CHECK(run_cli("compare log2.json --oracle median").exit_code == 2);
}

TEST_CASE("sweep: eta = 1 reproduces the log equilibrium") {
    const auto r = run_stable("sweep log2.json", "sweep_log2.csv");
    CHECK(r.exit_code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"eta", "c_0", "c_1", "status"});
    CHECK(std::stod(rows[1][1]) == doctest::Approx(0.6).epsilon(1e-4));
    CHECK(std::stod(rows[1][2]) == doctest::Approx(0.4).epsilon(1e-4));
}

TEST_CASE("sweep: consensus rows equal the shared belief") {
    const auto r = run_cli("sweep consensus.json --eta 0.5:3:3");
    CHECK(r.exit_code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][1]) == doctest::Approx(0.2).epsilon(1e-4));
        CHECK(std::stod(rows[i][2]) == doctest::Approx(0.5).epsilon(1e-4));
        CHECK(std::stod(rows[i][3]) == doctest::Approx(0.3).epsilon(1e-4));
    }
}

TEST_CASE("sweep: rows are ordered in eta and lie on the simplex") {
    const auto r = run_stable("sweep asym3.json --eta 0.5:4:8", "sweep_asym3.csv");
    CHECK(r.exit_code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 9);
    double previous = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double eta = std::stod(rows[i][0]);
        CHECK(eta > previous);
        previous = eta;
        const double total = std::stod(rows[i][1]) + std::stod(rows[i][2]) + std::stod(rows[i][3]);
        CHECK(std::abs(total - 1.0) < 1e-9);
        CHECK(rows[i][4] == "converged");
    }
    // The eta = 1 row is the log equilibrium: the wealth-weighted mean belief.
    CHECK(std::stod(rows[2][1]) == doctest::Approx((0.7 + 2 * 0.1 + 0.5 * 0.3) / 3.5).epsilon(1e-4));
}

TEST_CASE("sweep: flags non-convergence and exits 3") {
    const auto r = run_cli("sweep asym3.json --eta 2:3:2 --max-iter 2");
    CHECK(r.exit_code == 3);
    CHECK(r.out.find("not_converged") != std::string::npos);
    CHECK(run_cli("sweep log2.json --eta 3:1").exit_code == 2);
    CHECK(run_cli("sweep bets.json").exit_code == 2);
}
