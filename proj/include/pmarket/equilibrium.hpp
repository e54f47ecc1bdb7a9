#pragma once

#include <cstddef>
#include <string_view>

#include "pmarket/errors.hpp"
#include "pmarket/market.hpp"
#include "pmarket/vectors.hpp"

namespace pmarket {

enum class SolveMethod { analytic, fixed_point, numeric };

std::string_view to_string(SolveMethod method) noexcept;

struct EquilibriumResult {
    PriceVector prices;
    /// E(c) for utility markets, ||T(c) - c||^2 for parimutuel markets.
    double score = 0.0;
    std::size_t iterations = 0;
    SolveMethod method = SolveMethod::analytic;
};

struct SolverConfig {
    /// Convergence threshold on the score.
    double tolerance = 1e-10;
    std::size_t max_iterations = 10000;
    /// Step fraction of the fixed-point iterations, in (0, 1].
    double damping = 0.5;

    /// Throws DomainError on a nonpositive tolerance or damping outside (0, 1].
    void validate() const;
};

/// Raised when an iterative solver stops without meeting the tolerance.
/// Carries the best iterate seen.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(EquilibriumResult best, const std::string& what)
        : Error(what), best_(std::move(best)) {}
    const EquilibriumResult& best() const noexcept { return best_; }

private:
    EquilibriumResult best_;
};

/// Sum of all agents' demands at `prices`, marginal agents expanded to the
/// full space. Throws WrongClearingRuleError if any agent bets, and
/// SingularPriceError on a zero price.
StockholdingVector excess_demand(const MarketSpec& spec, const PriceVector& prices);

/// E(c): squared norm of excess demand.
double equilibrium_score(const MarketSpec& spec, const PriceVector& prices);

/// ||T(c) - c||^2 of the parimutuel clearing map. Betting agents only.
double parimutuel_score(const MarketSpec& spec, const PriceVector& prices);

/// True when solve_analytic accepts the market.
bool has_analytic_solution(const MarketSpec& spec);

/// Closed forms: wealth-weighted mean of beliefs for log utility and
/// constant betting, normalized geometric mean for exponential utility.
/// Throws UnsupportedAnalyticError for any other market.
EquilibriumResult solve_analytic(const MarketSpec& spec);

/// Damped fixed point of c_k <- c_k (1 + D_k(c) / sum W) for a homogeneous
/// isoelastic market of full-scope agents.
EquilibriumResult solve_isoelastic(const MarketSpec& spec, const SolverConfig& config = {});

/// Damped fixed point of stake-share clearing c_k = sum_i W_i phi_i(k, c) / total stake.
EquilibriumResult solve_parimutuel(const MarketSpec& spec, const SolverConfig& config = {});

/// Minimizes E over the open simplex (softmax of N_G - 1 free logits) from
/// uniform prices. Any mix of utility agents and scopes.
EquilibriumResult solve_numeric(const MarketSpec& spec, const SolverConfig& config = {});

/// Analytic when possible, otherwise the fixed point or numeric solver that fits the market.
EquilibriumResult solve(const MarketSpec& spec, const SolverConfig& config = {});

}  // namespace pmarket
