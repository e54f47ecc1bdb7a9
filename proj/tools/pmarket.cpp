// pmarket: clear, train, compare and sweep prediction-market ensembles.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "pmarket/commands.hpp"

namespace {

void add_solver_flags(CLI::App* cmd, pmarket::SolverConfig& config) {
    cmd->add_option("--tolerance", config.tolerance, "Convergence threshold on the equilibrium score")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", config.max_iterations, "Iteration limit of iterative solvers");
    cmd->add_option("--damping", config.damping, "Fixed-point step fraction in (0, 1]")
        ->check(CLI::Range(0.0, 1.0));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prediction-market belief aggregation"};
    app.require_subcommand(1);

    std::string market, data, out_path, oracle = "weighted-average", eta = "1:1:1", mode = "online";
    bool trace = false;
    pmarket::SolverConfig config;

    auto* clear = app.add_subcommand("clear", "Compute equilibrium prices of a market file");
    clear->add_option("market", market, "Market file")->required()->check(CLI::ExistingFile);
    add_solver_flags(clear, config);

    auto* train = app.add_subcommand("train", "Update agent wealths from a labeled dataset");
    train->add_option("market", market, "Market file")->required()->check(CLI::ExistingFile);
    train->add_option("data", data, "Line-delimited dataset")->required()->check(CLI::ExistingFile);
    train->add_option("--mode", mode, "online or batch")->check(CLI::IsMember({"online", "batch"}));
    train->add_flag("--trace", trace, "Emit the per-step wealth trace as CSV");

    auto* compare = app.add_subcommand("compare", "Compare equilibrium prices with an opinion pool");
    compare->add_option("market", market, "Market file")->required()->check(CLI::ExistingFile);
    compare->add_option("--oracle", oracle, "weighted-average or product")
        ->check(CLI::IsMember({"weighted-average", "product"}));
    add_solver_flags(compare, config);

    auto* sweep = app.add_subcommand("sweep", "Isoelastic equilibria over a range of eta");
    sweep->add_option("market", market, "Market file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--eta", eta, "lo:hi:steps");
    add_solver_flags(sweep, config);

    for (auto* cmd : {clear, train, compare, sweep})
        cmd->add_option("--out", out_path, "Write the result here instead of standard output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return pmarket::cli::kInputError;
    }

    std::unique_ptr<std::ofstream> file;
    if (!out_path.empty()) {
        file = std::make_unique<std::ofstream>(out_path, std::ios::binary);
        if (!*file) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return pmarket::cli::kInputError;
        }
    }
    std::ostream& out = file ? *file : std::cout;

    if (*clear) return pmarket::cli::cmd_clear(market, config, out, std::cerr);
    if (*train)
        return pmarket::cli::cmd_train(market, data,
                                       mode == "batch" ? pmarket::cli::TrainMode::batch
                                                       : pmarket::cli::TrainMode::online,
                                       trace, out, std::cerr);
    if (*compare) return pmarket::cli::cmd_compare(market, oracle, config, out, std::cerr);
    return pmarket::cli::cmd_sweep(market, eta, config, out, std::cerr);
}
