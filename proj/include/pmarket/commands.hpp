#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "pmarket/equilibrium.hpp"

namespace pmarket::cli {

/// Process exit codes shared by every command.
enum ExitCode : int {
    kOk = 0,
    kInputError = 2,
    kNotConverged = 3,
};

/// Clears the market; writes a JSON record with prices, score, iterations and method.
int cmd_clear(const std::filesystem::path& market, const SolverConfig& config, std::ostream& out,
              std::ostream& err);

enum class TrainMode { online, batch };

/// Trains wealths; writes a JSON record of final wealths, or the per-step
/// CSV trace when `trace` is set.
int cmd_train(const std::filesystem::path& market, const std::filesystem::path& data, TrainMode mode,
              bool trace, std::ostream& out, std::ostream& err);

/// Market prices against an opinion pool ("weighted-average" or "product").
int cmd_compare(const std::filesystem::path& market, const std::string& oracle,
                const SolverConfig& config, std::ostream& out, std::ostream& err);

/// Isoelastic equilibrium for each eta of "lo:hi:steps", as CSV.
int cmd_sweep(const std::filesystem::path& market, const std::string& eta_range,
              const SolverConfig& config, std::ostream& out, std::ostream& err);

}  // namespace pmarket::cli
