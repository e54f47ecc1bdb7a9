#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmarket/market.hpp"
#include "pmarket/training.hpp"

namespace pmarket::io {

inline constexpr int kFormatVersion = 1;

/// Parses a market file (JSON, "format_version": 1), validates it and
/// renormalizes beliefs. Throws ParseError naming the line or field path.
MarketSpec parse_market(std::string_view text);
MarketSpec load_market(const std::filesystem::path& path);

/// Market file text that parse_market turns back into an equal MarketSpec.
std::string serialize_market(const MarketSpec& spec);

/// Streams line-delimited training records {"beliefs": [[...], ...], "label": k}.
/// Blank lines are skipped. Rows are checked against the market and
/// renormalized; failures throw ParseError naming the line.
class DatasetReader {
public:
    DatasetReader(std::istream& in, const MarketSpec& spec);

    std::optional<TrainingInstance> next();
    std::size_t line() const noexcept { return line_; }

private:
    std::istream* in_;
    std::size_t agents_;
    std::size_t goods_;
    std::size_t line_ = 0;
};

std::vector<TrainingInstance> load_dataset(const std::filesystem::path& path, const MarketSpec& spec);

/// Fixed rendering: 12 significant digits.
std::string format_number(double x);

/// x rounded to 12 significant digits, for embedding in JSON records.
double rounded(double x);

}  // namespace pmarket::io
