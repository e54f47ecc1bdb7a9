#include "pmarket/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "pmarket/behavior.hpp"
#include "pmarket/kernels.hpp"

namespace pmarket {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double squared_norm(std::span<const double> v) { return dot(v, v); }

std::vector<double> uniform(std::size_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

void require_utility_agents(const MarketSpec& spec) {
    for (const auto& agent : spec.agents)
        if (!is_utility(agent.behavior.kind))
            throw WrongClearingRuleError("agent " + agent.id + " bets (" +
                                         std::string(to_string(agent.behavior.kind)) +
                                         "); betting markets clear parimutuel-style");
}

void require_prices(const MarketSpec& spec, const PriceVector& prices) {
    if (prices.size() != spec.space.num_goods())
        throw DomainError("expected " + std::to_string(spec.space.num_goods()) + " prices, got " +
                          std::to_string(prices.size()));
}

void require_full_scope(const MarketSpec& spec, std::string_view solver) {
    for (const auto& agent : spec.agents)
        if (!agent.full_scope())
            throw DomainError(std::string(solver) + ": agent " + agent.id + " holds a subspace belief");
}

// Stakes of every betting agent at `prices`, summed per good.
std::vector<double> total_stakes(const MarketSpec& spec, std::span<const double> prices) {
    const std::size_t n = prices.size();
    std::vector<double> stake(n, 0.0), row(n);
    for (const auto& agent : spec.agents) {
        demand_into(agent.behavior, agent.wealth, agent.belief.values(), prices, row);
        for (std::size_t k = 0; k < n; ++k) stake[k] += row[k];
    }
    return stake;
}

// Stake imbalance (stake_k - c_k * total stake) / total wealth. Zero exactly
// when c_k = stake_k / total stake, or when nobody stakes at all.
std::vector<double> stake_imbalance(const MarketSpec& spec, std::span<const double> prices,
                                    double wealth) {
    auto stake = total_stakes(spec, prices);
    const double total = sum(stake);
    for (std::size_t k = 0; k < stake.size(); ++k) stake[k] = (stake[k] - prices[k] * total) / wealth;
    return stake;
}

// E(c) over goods with positive price only. Used for closed forms that put
// zero price on goods some agent rules out.
double support_score(const MarketSpec& spec, const std::vector<double>& prices) {
    std::vector<std::size_t> support;
    for (std::size_t k = 0; k < prices.size(); ++k)
        if (prices[k] > 0.0) support.push_back(k);
    if (support.size() == prices.size()) return equilibrium_score(spec, PriceVector(prices));

    std::vector<double> c;
    for (auto k : support) c.push_back(prices[k]);
    double score = 0.0;
    std::vector<double> total(support.size(), 0.0), belief(support.size()), row(support.size());
    for (const auto& agent : spec.agents) {
        if (agent.wealth == 0.0 && is_wealth_proportional(agent.behavior.kind)) continue;
        for (std::size_t j = 0; j < support.size(); ++j) belief[j] = agent.belief[support[j]];
        demand_into(agent.behavior, agent.wealth, belief, c, row);
        for (std::size_t j = 0; j < support.size(); ++j) total[j] += row[j];
    }
    score = squared_norm(total);
    return score;
}

// Shared driver of the damped fixed-point solvers. `step` returns the
// direction d(c), with c + d(c) the undamped image, and the score of c.
// Each iteration first probes the undamped image; otherwise it takes a
// damped step. The score of a fixed-point iteration need not fall at every
// step, so a step is accepted when it beats the worst of the last few
// accepted scores and is halved otherwise, down to a floor.
template <class DirectionAndScore>
EquilibriumResult damped_fixed_point(std::size_t n, const SolverConfig& config, double max_fraction,
                                     std::string_view name, DirectionAndScore step) {
    constexpr std::size_t kWindow = 10;
    constexpr double kMinFraction = 1.0 / 1024;
    config.validate();
    std::vector<double> c = uniform(n), trial(n);
    auto [direction, score] = step(c);
    std::vector<double> best = c;
    double best_score = score;
    std::deque<double> recent{score};
    double fraction = max_fraction;

    auto fail = [&](std::size_t it, const std::string& why) {
        return NonConvergenceError({PriceVector(best), best_score, it, SolveMethod::fixed_point},
                                   std::string(name) + " " + why + " (best score " +
                                       std::to_string(best_score) + ")");
    };

    for (std::size_t it = 0;; ++it) {
        if (score < config.tolerance) return {PriceVector(c), score, it, SolveMethod::fixed_point};
        if (it == config.max_iterations)
            throw fail(it, "did not converge in " + std::to_string(config.max_iterations) + " iterations");

        for (std::size_t k = 0; k < n; ++k) trial[k] = c[k] + direction[k];
        auto probe = step(trial);
        if (probe.second < config.tolerance)
            return {PriceVector(trial), probe.second, it + 1, SolveMethod::fixed_point};

        const double bound = *std::max_element(recent.begin(), recent.end());
        while (true) {
            for (std::size_t k = 0; k < n; ++k) trial[k] = c[k] + fraction * direction[k];
            probe = step(trial);
            // A short step is taken regardless: the iteration may have to
            // climb out of a saturated region before the score falls again.
            if (probe.second < bound || fraction <= kMinFraction * max_fraction) break;
            fraction *= 0.5;
        }
        c.swap(trial);
        std::tie(direction, score) = std::move(probe);
        if (score < best_score) best_score = score, best = c;
        recent.push_back(score);
        if (recent.size() > kWindow) recent.pop_front();
        fraction = std::min(max_fraction, 2.0 * fraction);
    }
}

std::vector<double> softmax_prices(const Eigen::VectorXd& logits) {
    const std::size_t n = static_cast<std::size_t>(logits.size()) + 1;
    double top = 0.0;
    for (Eigen::Index j = 0; j < logits.size(); ++j) top = std::max(top, logits[j]);
    std::vector<double> c(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double z = k + 1 < n ? logits[static_cast<Eigen::Index>(k)] : 0.0;
        c[k] = std::exp(z - top);
        total += c[k];
    }
    for (double& x : c) x /= total;
    return c;
}

}  // namespace

std::string_view to_string(SolveMethod method) noexcept {
    switch (method) {
        case SolveMethod::analytic: return "analytic";
        case SolveMethod::fixed_point: return "fixed_point";
        case SolveMethod::numeric: return "numeric";
    }
    return "unknown";
}

void SolverConfig::validate() const {
    if (!(tolerance > 0.0)) throw DomainError("solver tolerance must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("solver damping must lie in (0, 1]");
}

StockholdingVector excess_demand(const MarketSpec& spec, const PriceVector& prices) {
    require_utility_agents(spec);
    require_prices(spec, prices);
    const PreparedMarket market(spec);
    return StockholdingVector(aggregate_demand(market, prices.values()));
}

double equilibrium_score(const MarketSpec& spec, const PriceVector& prices) {
    return squared_norm(excess_demand(spec, prices).values());
}

double parimutuel_score(const MarketSpec& spec, const PriceVector& prices) {
    require_prices(spec, prices);
    for (const auto& agent : spec.agents)
        if (!is_betting(agent.behavior.kind))
            throw WrongClearingRuleError("agent " + agent.id + " is a utility agent; use equilibrium_score");
    const double wealth = total_wealth(spec);
    if (!(wealth > 0.0)) throw DomainError("parimutuel_score: total wealth is zero");
    return squared_norm(stake_imbalance(spec, prices.values(), wealth));
}

bool has_analytic_solution(const MarketSpec& spec) {
    const auto kind = homogeneous_kind(spec);
    if (!kind) return false;
    if (*kind != BehaviorKind::log_utility && *kind != BehaviorKind::exp_utility &&
        *kind != BehaviorKind::constant_bet)
        return false;
    return std::all_of(spec.agents.begin(), spec.agents.end(),
                       [](const Agent& a) { return a.full_scope(); });
}

EquilibriumResult solve_analytic(const MarketSpec& spec) {
    if (!has_analytic_solution(spec))
        throw UnsupportedAnalyticError(
            "no closed form: market must be homogeneous log_utility, exp_utility or constant_bet "
            "with full-scope agents");

    const std::size_t n = spec.space.num_goods();
    const auto kind = *homogeneous_kind(spec);
    std::vector<double> c(n, 0.0);

    if (kind == BehaviorKind::exp_utility) {
        const double weight = 1.0 / static_cast<double>(spec.agents.size());
        for (const auto& agent : spec.agents)
            for (std::size_t k = 0; k < n; ++k)
                c[k] += weight * (agent.belief[k] > 0.0 ? std::log(agent.belief[k]) : -kInf);
        const double top = *std::max_element(c.begin(), c.end());
        if (!std::isfinite(top))
            throw DegenerateDataError("every good is ruled out by some agent; geometric pool is empty");
        for (double& x : c) x = std::exp(x - top);
    } else {
        for (const auto& agent : spec.agents)
            for (std::size_t k = 0; k < n; ++k) c[k] += agent.wealth * agent.belief[k];
    }

    const double total = sum(c);
    if (!(total > 0.0)) throw DomainError("solve_analytic: total wealth is zero");
    for (double& x : c) x /= total;

    const double score = kind == BehaviorKind::constant_bet ? parimutuel_score(spec, PriceVector(c))
                                                            : support_score(spec, c);
    return {PriceVector(std::move(c)), score, 0, SolveMethod::analytic};
}

EquilibriumResult solve_isoelastic(const MarketSpec& spec, const SolverConfig& config) {
    if (homogeneous_kind(spec) != BehaviorKind::isoelastic_utility)
        throw DomainError("solve_isoelastic: market is not homogeneous isoelastic");
    require_full_scope(spec, "solve_isoelastic");
    const double wealth = total_wealth(spec);
    if (!(wealth > 0.0)) throw DomainError("solve_isoelastic: total wealth is zero");

    const PreparedMarket market(spec);
    const std::size_t n = spec.space.num_goods();
    return damped_fixed_point(n, config, config.damping, "solve_isoelastic", [&](const std::vector<double>& c) {
        const auto d = aggregate_demand(market, c);
        std::vector<double> direction(n);
        for (std::size_t k = 0; k < n; ++k) direction[k] = c[k] * d[k] / wealth;
        return std::pair{std::move(direction), squared_norm(d)};
    });
}

EquilibriumResult solve_parimutuel(const MarketSpec& spec, const SolverConfig& config) {
    if (spec.agents.empty()) throw DomainError("solve_parimutuel: market has no agents");
    for (const auto& agent : spec.agents)
        if (!is_betting(agent.behavior.kind))
            throw WrongClearingRuleError("solve_parimutuel: agent " + agent.id + " is a utility agent");
    require_full_scope(spec, "solve_parimutuel");

    const std::size_t n = spec.space.num_goods();
    const double wealth = total_wealth(spec);
    if (!(wealth > 0.0)) throw DomainError("solve_parimutuel: total wealth is zero");
    // Near an equilibrium the stake imbalance of an aggressive bettor reacts
    // to price errors with gain 1/epsilon, so its step is scaled down to match.
    double max_fraction = config.damping;
    for (const auto& agent : spec.agents)
        if (agent.behavior.kind == BehaviorKind::aggressive_bet)
            max_fraction = std::min(max_fraction, config.damping * agent.behavior.epsilon);
    return damped_fixed_point(n, config, max_fraction, "solve_parimutuel", [&](const std::vector<double>& c) {
        auto direction = stake_imbalance(spec, c, wealth);
        const double score = squared_norm(direction);
        return std::pair{std::move(direction), score};
    });
}

EquilibriumResult solve_numeric(const MarketSpec& spec, const SolverConfig& config) {
    config.validate();
    require_utility_agents(spec);
    if (spec.agents.empty()) throw DomainError("solve_numeric: market has no agents");

    const PreparedMarket market(spec);
    const std::size_t n = spec.space.num_goods();
    const auto m = static_cast<Eigen::Index>(n - 1);

    auto residual = [&](const Eigen::VectorXd& z, Eigen::VectorXd& r) -> bool {
        const auto c = softmax_prices(z);
        try {
            const auto d = aggregate_demand(market, c);
            r = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(n));
        } catch (const SingularPriceError&) {
            return false;
        }
        return r.allFinite();
    };

    Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd r;
    if (!residual(z, r)) throw SingularPriceError("solve_numeric: demand undefined at uniform prices");
    double score = r.squaredNorm();
    double mu = 1e-3;
    constexpr double kFdStep = 1e-6;

    Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), m);
    Eigen::VectorXd r_plus, r_minus, r_trial;

    auto result = [&](std::size_t it) {
        return EquilibriumResult{PriceVector(softmax_prices(z)), score, it, SolveMethod::numeric};
    };

    for (std::size_t it = 0; it < config.max_iterations; ++it) {
        if (score < config.tolerance) return result(it);

        for (Eigen::Index j = 0; j < m; ++j) {
            Eigen::VectorXd zp = z, zm = z;
            zp[j] += kFdStep;
            zm[j] -= kFdStep;
            if (!residual(zp, r_plus) || !residual(zm, r_minus))
                throw NonConvergenceError(result(it), "solve_numeric: demand undefined near the iterate");
            jac.col(j) = (r_plus - r_minus) / (2.0 * kFdStep);
        }

        const Eigen::VectorXd gradient = 2.0 * jac.transpose() * r;
        if (gradient.norm() < config.tolerance * 1e-2)
            throw NonConvergenceError(result(it), "solve_numeric: stalled at a non-equilibrium "
                                                  "stationary point (score " +
                                                      std::to_string(score) + ")");

        const Eigen::MatrixXd normal = jac.transpose() * jac;
        const Eigen::VectorXd rhs = -jac.transpose() * r;
        bool improved = false;
        while (!improved && mu < 1e12) {
            Eigen::MatrixXd damped = normal;
            damped.diagonal().array() += mu * (1.0 + normal.diagonal().array());
            const Eigen::VectorXd delta = damped.ldlt().solve(rhs);
            const Eigen::VectorXd trial = z + delta;
            if (residual(trial, r_trial) && r_trial.squaredNorm() < score) {
                z = trial;
                r = r_trial;
                score = r.squaredNorm();
                mu = std::max(mu / 10.0, 1e-12);
                improved = true;
            } else {
                mu *= 10.0;
            }
        }
        if (!improved)
            throw NonConvergenceError(result(it + 1), "solve_numeric: no descent step found (score " +
                                                          std::to_string(score) + ")");
    }
    if (score < config.tolerance) return result(config.max_iterations);
    throw NonConvergenceError(result(config.max_iterations),
                              "solve_numeric did not converge in " +
                                  std::to_string(config.max_iterations) + " iterations");
}

EquilibriumResult solve(const MarketSpec& spec, const SolverConfig& config) {
    if (has_analytic_solution(spec)) return solve_analytic(spec);
    const auto kind = homogeneous_kind(spec);
    const bool full = std::all_of(spec.agents.begin(), spec.agents.end(),
                                  [](const Agent& a) { return a.full_scope(); });
    if (kind == BehaviorKind::isoelastic_utility && full) return solve_isoelastic(spec, config);
    if (!spec.agents.empty() && is_betting(spec.agents.front().behavior.kind))
        return solve_parimutuel(spec, config);
    return solve_numeric(spec, config);
}

}  // namespace pmarket
