// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "pmarket/kernels.hpp"

namespace {

pmarket::MarketSpec log_market(std::size_t agents, std::size_t goods) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::vector<std::string> outcomes;
    for (std::size_t k = 0; k < goods; ++k) outcomes.push_back("o" + std::to_string(k));
    pmarket::MarketSpec spec{pmarket::OutcomeSpace::flat(std::move(outcomes)), {}};
    for (std::size_t i = 0; i < agents; ++i) {
        std::vector<double> belief(goods);
        double total = 0.0;
        for (auto& x : belief) total += (x = unit(rng));
        for (auto& x : belief) x /= total;
        pmarket::Agent agent;
        agent.id = "a" + std::to_string(i);
        agent.wealth = unit(rng);
        agent.belief = pmarket::BeliefVector(std::move(belief));
        spec.agents.push_back(std::move(agent));
    }
    return spec;
}

template <auto Kernel>
void BM_AggregateDemand(benchmark::State& state) {
    const auto agents = static_cast<std::size_t>(state.range(0));
    const auto goods = static_cast<std::size_t>(state.range(1));
    const auto spec = log_market(agents, goods);
    const pmarket::PreparedMarket market(spec);
    const std::vector<double> prices(goods, 1.0 / static_cast<double>(goods));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(market, prices));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(agents * goods));
    state.counters["threads"] = pmarket::kernel_threads();
}

template <auto Kernel>
void BM_ColumnSums(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto cols = static_cast<std::size_t>(state.range(1));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> matrix(rows * cols);
    for (auto& x : matrix) x = unit(rng);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(matrix, rows, cols));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * cols));
}

}  // namespace

BENCHMARK(BM_AggregateDemand<pmarket::aggregate_demand_serial>)
    ->Name("aggregate_demand/serial")
    ->Args({64, 1024})
    ->Args({512, 4096});
BENCHMARK(BM_AggregateDemand<pmarket::aggregate_demand_parallel>)
    ->Name("aggregate_demand/parallel")
    ->Args({64, 1024})
    ->Args({512, 4096});
BENCHMARK(BM_ColumnSums<pmarket::column_sums_serial>)->Name("column_sums/serial")->Args({1000, 20})->Args({4096, 256});
BENCHMARK(BM_ColumnSums<pmarket::column_sums_parallel>)->Name("column_sums/parallel")->Args({1000, 20})->Args({4096, 256});

BENCHMARK_MAIN();
