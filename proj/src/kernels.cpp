#include "pmarket/kernels.hpp"

#include <algorithm>
#include <exception>

#include "pmarket/behavior.hpp"
#include "pmarket/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pmarket {

namespace {

// Below this many agent-good evaluations the thread fork costs more than it saves.
constexpr std::size_t kParallelThreshold = 1 << 14;

// Size of the per-chunk demand buffer of the parallel kernel (256 KiB).
constexpr std::size_t kChunkDoubles = 1 << 15;

}  // namespace

PreparedMarket::PreparedMarket(const MarketSpec& spec) : spec_(&spec) {
    projections_.reserve(spec.agents.size());
    for (const auto& agent : spec.agents) {
        if (agent.full_scope()) projections_.emplace_back(std::nullopt);
        else projections_.emplace_back(Projection(spec.space, agent.subspace));
    }
}

void PreparedMarket::agent_demand_into(std::size_t i, std::span<const double> prices,
                                       std::span<double> out, std::vector<double>& scratch) const {
    const Agent& agent = spec_->agents[i];
    if (!projections_[i]) {
        demand_into(agent.behavior, agent.wealth, agent.belief.values(), prices, out);
        return;
    }
    if (!is_utility(agent.behavior.kind))
        throw DomainError("betting agent " + agent.id + " has no marginal behavior");
    const Projection& proj = *projections_[i];
    const std::size_t m = proj.num_marginal();
    scratch.resize(std::max(scratch.size(), 2 * m));
    std::span<double> mprices(scratch.data(), m);
    std::span<double> mshares(scratch.data() + m, m);
    proj.marginalize(prices, mprices);
    demand_into(agent.behavior, agent.wealth, agent.belief.values(), mprices, mshares);
    proj.expand(mshares, out);
}

std::vector<double> aggregate_demand_serial(const PreparedMarket& market,
                                            std::span<const double> prices) {
    const std::size_t n = market.num_goods();
    std::vector<double> total(n, 0.0), row(n);
    std::vector<double> scratch;
    for (std::size_t i = 0; i < market.num_agents(); ++i) {
        market.agent_demand_into(i, prices, row, scratch);
        for (std::size_t k = 0; k < n; ++k) total[k] += row[k];
    }
    return total;
}

std::vector<double> aggregate_demand_parallel(const PreparedMarket& market,
                                              std::span<const double> prices) {
    const std::size_t n = market.num_goods();
    const std::size_t agents = market.num_agents();
    const auto threads = static_cast<std::size_t>(kernel_threads());
    // Agents are streamed through a cache-sized buffer, one chunk at a time.
    const std::size_t chunk = std::min(agents, std::max(2 * threads, kChunkDoubles / std::max<std::size_t>(n, 1)));
    std::vector<double> total(n, 0.0), rows(chunk * n);

    // Exceptions may not escape an OpenMP region; carry the first one out.
    std::exception_ptr failure;
#pragma omp parallel
    {
        std::vector<double> scratch;
#ifdef _OPENMP
        const auto team = static_cast<std::size_t>(omp_get_num_threads());
        const auto id = static_cast<std::size_t>(omp_get_thread_num());
#else
        const std::size_t team = 1, id = 0;
#endif
        const std::size_t lo = n * id / team, hi = n * (id + 1) / team;
        for (std::size_t first = 0; first < agents; first += chunk) {
            const std::size_t count = std::min(chunk, agents - first);
#pragma omp for schedule(static)
            for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(count); ++j) {
                try {
                    market.agent_demand_into(first + static_cast<std::size_t>(j), prices,
                                             std::span<double>(rows.data() + j * n, n), scratch);
                } catch (...) {
#pragma omp critical
                    if (!failure) failure = std::current_exception();
                }
            }
            // Fold the chunk into this thread's columns in agent order.
            for (std::size_t j = 0; j < count; ++j) {
                const double* row = rows.data() + j * n;
                for (std::size_t k = lo; k < hi; ++k) total[k] += row[k];
            }
#pragma omp barrier
        }
    }
    if (failure) std::rethrow_exception(failure);
    return total;
}

std::vector<double> aggregate_demand(const PreparedMarket& market, std::span<const double> prices) {
    if (market.num_agents() > 1 && market.num_agents() * market.num_goods() >= kParallelThreshold &&
        kernel_threads() > 1)
        return aggregate_demand_parallel(market, prices);
    return aggregate_demand_serial(market, prices);
}

std::vector<double> column_sums_serial(std::span<const double> matrix, std::size_t rows,
                                       std::size_t cols) {
    std::vector<double> out(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out[c] += matrix[r * cols + c];
    return out;
}

std::vector<double> column_sums_parallel(std::span<const double> matrix, std::size_t rows,
                                         std::size_t cols) {
    std::vector<double> out(cols, 0.0);
    // Each thread owns a contiguous block of columns and sweeps it row by
    // row, so every column is still accumulated in row order.
#pragma omp parallel
    {
#ifdef _OPENMP
        const auto threads = static_cast<std::size_t>(omp_get_num_threads());
        const auto id = static_cast<std::size_t>(omp_get_thread_num());
#else
        const std::size_t threads = 1, id = 0;
#endif
        const std::size_t lo = cols * id / threads, hi = cols * (id + 1) / threads;
        for (std::size_t r = 0; r < rows; ++r) {
            const double* row = matrix.data() + r * cols;
            for (std::size_t c = lo; c < hi; ++c) out[c] += row[c];
        }
    }
    return out;
}

int kernel_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace pmarket
