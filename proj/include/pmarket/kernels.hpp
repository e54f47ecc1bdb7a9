#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pmarket/marginal.hpp"
#include "pmarket/market.hpp"

namespace pmarket {

/// A market with per-agent projections precomputed, for repeated demand
/// evaluation inside solvers. Holds a reference to `spec`.
class PreparedMarket {
public:
    explicit PreparedMarket(const MarketSpec& spec);

    const MarketSpec& spec() const noexcept { return *spec_; }
    std::size_t num_goods() const noexcept { return spec_->space.num_goods(); }
    std::size_t num_agents() const noexcept { return spec_->agents.size(); }

    /// Full-space demand of agent i written into `out`. `scratch` must hold
    /// at least twice the agent's marginal outcome count (unused for
    /// full-scope agents).
    void agent_demand_into(std::size_t i, std::span<const double> prices, std::span<double> out,
                           std::vector<double>& scratch) const;

private:
    const MarketSpec* spec_;
    std::vector<std::optional<Projection>> projections_;
};

/// Aggregate demand, summed in agent order. Reference implementation.
std::vector<double> aggregate_demand_serial(const PreparedMarket& market,
                                            std::span<const double> prices);

/// Same result, bit for bit: agent rows are evaluated concurrently and then
/// reduced in agent order.
std::vector<double> aggregate_demand_parallel(const PreparedMarket& market,
                                              std::span<const double> prices);

/// Picks the parallel kernel once the agents x goods workload is large.
std::vector<double> aggregate_demand(const PreparedMarket& market, std::span<const double> prices);

/// Column sums of a row-major rows x cols matrix, each column accumulated in
/// row order. The parallel variant splits columns across threads.
std::vector<double> column_sums_serial(std::span<const double> matrix, std::size_t rows,
                                       std::size_t cols);
std::vector<double> column_sums_parallel(std::span<const double> matrix, std::size_t rows,
                                         std::size_t cols);

/// Worker threads the parallel kernels will use.
int kernel_threads() noexcept;

}  // namespace pmarket
