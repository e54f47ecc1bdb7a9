#pragma once

#include <span>

#include "pmarket/behavior_spec.hpp"
#include "pmarket/market.hpp"
#include "pmarket/vectors.hpp"

namespace pmarket {

/// Floor applied to beliefs inside logarithms only.
inline constexpr double kLogFloor = 1e-300;

/// U(x) for the three utility families. Log is -inf for x <= 0; isoelastic
/// with eta == 1 is evaluated as log. Throws DomainError for betting kinds.
double utility_value(BehaviorKind kind, double eta, double x);

/// Fraction of wealth bet on each good by a betting agent, rescaled to sum
/// to at most one. Throws DomainError for utility kinds.
ProportionVector proportion(const BehaviorSpec& behavior, std::span<const double> belief,
                            std::span<const double> prices);

/// Optimal holding of an agent with the given behavior, wealth and belief at
/// `prices`. Utility kinds satisfy holdings . prices == 0; betting kinds
/// return currency staked per good. Throws SingularPriceError when a utility
/// agent meets a zero price and DomainError on size mismatch.
StockholdingVector demand(const BehaviorSpec& behavior, double wealth,
                          std::span<const double> belief, std::span<const double> prices);

/// Allocation-free form of demand(); `out` must have prices.size() entries.
void demand_into(const BehaviorSpec& behavior, double wealth, std::span<const double> belief,
                 std::span<const double> prices, std::span<double> out);

/// Demand of a full-scope agent. Marginal agents go through marginal_demand().
StockholdingVector demand(const Agent& agent, const PriceVector& prices);

/// Certifies the first-order condition P(k) U'(W + s_k) = lambda c_k of a
/// utility agent's demand. U' is taken by central differences of
/// utility_value with relative step `h`; returns
/// max_k |P(k) U'(W + s_k) / c_k - lambda| / |lambda| with lambda the mean
/// ratio. Goods with zero belief are skipped.
double demand_jacobian_check(const Agent& agent, const PriceVector& prices, double h = 1e-5);

}  // namespace pmarket
