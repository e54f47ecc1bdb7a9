#include "pmarket/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pmarket/errors.hpp"

namespace pmarket {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamped_log(double p) { return std::log(std::max(p, kLogFloor)); }

void require_sizes(std::span<const double> belief, std::span<const double> prices,
                   std::span<double> out) {
    if (belief.size() != prices.size() || out.size() != prices.size())
        throw DomainError("belief has " + std::to_string(belief.size()) + " entries but " +
                          std::to_string(prices.size()) + " prices were given");
}

void require_positive(std::span<const double> prices) {
    for (std::size_t k = 0; k < prices.size(); ++k)
        if (!(prices[k] > 0.0))
            throw SingularPriceError("price of good " + std::to_string(k) +
                                     " is not positive; utility demand is undefined");
}

}  // namespace

double utility_value(BehaviorKind kind, double eta, double x) {
    switch (kind) {
        case BehaviorKind::log_utility:
            return x > 0.0 ? std::log(x) : -kInf;
        case BehaviorKind::exp_utility:
            return -std::exp(-x);
        case BehaviorKind::isoelastic_utility:
            if (eta == 1.0) return x > 0.0 ? std::log(x) : -kInf;
            if (x < 0.0) return -kInf;
            if (x == 0.0) return eta < 1.0 ? -1.0 / (1.0 - eta) : -kInf;
            return (std::pow(x, 1.0 - eta) - 1.0) / (1.0 - eta);
        default:
            throw DomainError("utility_value: " + std::string(to_string(kind)) + " is not a utility kind");
    }
}

ProportionVector proportion(const BehaviorSpec& behavior, std::span<const double> belief,
                            std::span<const double> prices) {
    if (belief.size() != prices.size()) throw DomainError("proportion: belief/price size mismatch");
    std::vector<double> phi(prices.size());
    switch (behavior.kind) {
        case BehaviorKind::constant_bet:
            std::copy(belief.begin(), belief.end(), phi.begin());
            break;
        case BehaviorKind::linear_bet:
            for (std::size_t k = 0; k < phi.size(); ++k) phi[k] = (1.0 - prices[k]) * belief[k];
            break;
        case BehaviorKind::aggressive_bet: {
            const double eps = behavior.epsilon;
            for (std::size_t k = 0; k < phi.size(); ++k) {
                if (prices[k] <= belief[k] - eps) phi[k] = 1.0;
                else if (prices[k] >= belief[k]) phi[k] = 0.0;
                else phi[k] = (belief[k] - prices[k]) / eps;
            }
            break;
        }
        default:
            throw DomainError("proportion: " + std::string(to_string(behavior.kind)) +
                              " is not a betting kind");
    }
    for (double& x : phi) x = std::clamp(x, 0.0, 1.0);
    const double total = sum(phi);
    if (total > 1.0)
        for (double& x : phi) x /= total;
    return ProportionVector(std::move(phi));
}

void demand_into(const BehaviorSpec& behavior, double wealth, std::span<const double> belief,
                 std::span<const double> prices, std::span<double> out) {
    require_sizes(belief, prices, out);
    const std::size_t n = prices.size();

    switch (behavior.kind) {
        case BehaviorKind::log_utility:
            require_positive(prices);
            for (std::size_t k = 0; k < n; ++k) out[k] = wealth * (belief[k] - prices[k]) / prices[k];
            return;

        case BehaviorKind::exp_utility: {
            require_positive(prices);
            double mean = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                out[k] = clamped_log(belief[k]) - std::log(prices[k]);
                mean += prices[k] * out[k];
            }
            for (std::size_t k = 0; k < n; ++k) out[k] -= mean;
            return;
        }

        case BehaviorKind::isoelastic_utility: {
            require_positive(prices);
            const double inv_eta = 1.0 / behavior.eta;
            double norm = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                out[k] = std::exp(inv_eta * (clamped_log(belief[k]) - std::log(prices[k])));
                norm += prices[k] * out[k];
            }
            for (std::size_t k = 0; k < n; ++k) out[k] = wealth * (out[k] / norm - 1.0);
            return;
        }

        default: {
            const auto phi = proportion(behavior, belief, prices);
            for (std::size_t k = 0; k < n; ++k) out[k] = wealth * phi[k];
            return;
        }
    }
}

StockholdingVector demand(const BehaviorSpec& behavior, double wealth,
                          std::span<const double> belief, std::span<const double> prices) {
    std::vector<double> out(prices.size());
    demand_into(behavior, wealth, belief, prices, out);
    return StockholdingVector(std::move(out));
}

StockholdingVector demand(const Agent& agent, const PriceVector& prices) {
    if (!agent.full_scope())
        throw DomainError("agent " + agent.id + " holds a subspace belief; use marginal_demand");
    return demand(agent.behavior, agent.wealth, agent.belief.values(), prices.values());
}

double demand_jacobian_check(const Agent& agent, const PriceVector& prices, double h) {
    const auto kind = agent.behavior.kind;
    if (!is_utility(kind))
        throw DomainError("demand_jacobian_check: agent " + agent.id + " is not a utility agent");
    if (!(h > 0.0)) throw DomainError("demand_jacobian_check: step must be positive");

    const auto s = demand(agent, prices);
    const double eta = agent.behavior.eta;

    std::vector<double> ratios;
    for (std::size_t k = 0; k < prices.size(); ++k) {
        if (agent.belief[k] <= 0.0) continue;
        const double x = agent.wealth + s[k];
        const double step = kind == BehaviorKind::exp_utility ? h * std::max(1.0, std::abs(x))
                                                              : h * std::abs(x);
        if (step == 0.0) return kInf;
        const double du = (utility_value(kind, eta, x + step) - utility_value(kind, eta, x - step)) /
                          (2.0 * step);
        ratios.push_back(agent.belief[k] * du / prices[k]);
    }
    if (ratios.empty()) return 0.0;

    const double lambda = sum(ratios) / static_cast<double>(ratios.size());
    double worst = 0.0;
    for (double r : ratios) worst = std::max(worst, std::abs(r - lambda));
    return lambda != 0.0 ? worst / std::abs(lambda) : worst;
}

}  // namespace pmarket
