#pragma once

#include <span>
#include <vector>

#include "pmarket/vectors.hpp"

namespace pmarket {

/// Closed-form opinion pools: the combination shapes of classic ensembles.
/// Written without reference to the equilibrium solvers so they can check them.
namespace pools {

struct PoolInput {
    std::vector<BeliefVector> beliefs;
    std::vector<double> weights;
};

/// sum_i w_i P_i / sum_i w_i. Equal weights give the plain average.
/// Throws DomainError on mismatched lengths, negative or all-zero weights.
BeliefVector weighted_average_pool(const PoolInput& input);

/// Normalized prod_i P_i(k)^exponent. Throws DomainError for no beliefs or
/// exponent <= 0, DegenerateDataError when the product vanishes everywhere.
BeliefVector product_pool(std::span<const BeliefVector> beliefs, double exponent);

/// Mixture of experts on one instance: the weighted average with that
/// instance's gate values as weights.
BeliefVector gated_pool(std::span<const double> gates, std::span<const BeliefVector> beliefs);

}  // namespace pools
}  // namespace pmarket
