#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pmarket/market.hpp"
#include "pmarket/vectors.hpp"

namespace pmarket {

/// One labeled example: every agent's belief on this instance and the
/// realized good.
struct TrainingInstance {
    std::vector<BeliefVector> beliefs;
    std::size_t label = 0;
};

struct WealthStep {
    /// Wealths after this step (the initial wealths at step 0).
    std::vector<double> wealths;
    /// Clearing prices of the instance consumed at this step; empty at step 0.
    PriceVector prices;
    /// Price of the realized good; 0 at step 0.
    double price_at_label = 0.0;
};

struct WealthTrace {
    /// steps[0] holds the initial wealths, steps[t] the state after instance t.
    std::vector<WealthStep> steps;

    const std::vector<double>& final_wealths() const { return steps.back().wealths; }
};

/// Throws DomainError unless the market is homogeneous log utility with
/// full-scope agents and strictly positive wealths, or the instance does not
/// fit the market (agent count, belief length, label range, normalization).
void check_training_inputs(const MarketSpec& spec, std::span<const TrainingInstance> data);

/// Clears the market on each instance at the current wealths, then pays out:
/// W_i <- W_i P_i(k) / c_k. Throws DegeneratePriceError when c_k = 0.
WealthTrace train_online(const MarketSpec& spec, std::span<const TrainingInstance> data);

/// Splits each wealth into T equal pieces, one per instance, all priced at
/// the initial wealths: W_i = (W_i^0 / T) sum_t P_i(k_t) / c_{k_t}.
/// steps[t] is the wealth once the first t pieces have settled.
WealthTrace train_batch(const MarketSpec& spec, std::span<const TrainingInstance> data);

/// posterior_i proportional to prior_i prod_t P_i(k_t), computed in log space.
/// Throws DegenerateDataError if every agent is ruled out.
std::vector<double> bayesian_posterior(std::span<const double> prior,
                                       std::span<const TrainingInstance> data);

/// Divides by the sum.
std::vector<double> normalized(std::span<const double> weights);

}  // namespace pmarket
