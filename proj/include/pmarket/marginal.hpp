#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pmarket/market.hpp"
#include "pmarket/vectors.hpp"

namespace pmarket {

/// Map from full-space goods to the joint outcomes of a subset of variables.
/// Marginal outcomes are enumerated lexicographically in the order the
/// subset lists its variables.
class Projection {
public:
    /// Throws DomainError for an empty subset or an unknown variable.
    Projection(const OutcomeSpace& space, std::span<const std::string> subspace);

    std::size_t num_goods() const noexcept { return index_.size(); }
    std::size_t num_marginal() const noexcept { return num_marginal_; }

    /// Marginal outcome that full good `good` projects onto.
    std::size_t operator[](std::size_t good) const { return index_[good]; }

    /// out[m] = sum of full[g] over goods g projecting onto m.
    void marginalize(std::span<const double> full, std::span<double> out) const;

    /// out[g] = marginal[projection of g].
    void expand(std::span<const double> marginal, std::span<double> out) const;

private:
    std::vector<std::size_t> index_;
    std::size_t num_marginal_ = 0;
};

/// Price of each bundle good of the subspace: the total price of all full
/// goods consistent with it.
PriceVector marginal_price(const OutcomeSpace& space, const PriceVector& prices,
                           std::span<const std::string> subspace);

/// Full-space holding equivalent to holding `marginal_shares` bundle goods.
/// Throws DomainError on a length mismatch.
StockholdingVector expand_stockholding(const OutcomeSpace& space,
                                       std::span<const std::string> subspace,
                                       std::span<const double> marginal_shares);

/// Demand of a utility agent whose belief lives on a subspace: its utility
/// is maximized over bundle goods at marginal prices, then expanded. A
/// full-scope agent gets plain demand(). Betting kinds throw DomainError.
StockholdingVector marginal_demand(const OutcomeSpace& space, const Agent& agent,
                                   const PriceVector& prices);

/// Full-space demand of any agent, dispatching on its scope.
StockholdingVector agent_demand(const OutcomeSpace& space, const Agent& agent,
                                const PriceVector& prices);

}  // namespace pmarket
