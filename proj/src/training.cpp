#include "pmarket/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pmarket/equilibrium.hpp"
#include "pmarket/errors.hpp"
#include "pmarket/kernels.hpp"

namespace pmarket {

namespace {

// The market re-specified with one instance's beliefs and the given wealths.
MarketSpec instance_market(const MarketSpec& spec, const TrainingInstance& instance,
                           std::span<const double> wealths) {
    MarketSpec market = spec;
    for (std::size_t i = 0; i < market.agents.size(); ++i) {
        market.agents[i].belief = instance.beliefs[i];
        market.agents[i].wealth = wealths[i];
    }
    return market;
}

double label_price(const PriceVector& prices, std::size_t label, std::size_t step) {
    const double c = prices[label];
    if (!(c > 0.0))
        throw DegeneratePriceError(step, "step " + std::to_string(step) + ": price of realized good " +
                                             std::to_string(label) +
                                             " is zero (every agent ruled it out)");
    return c;
}

std::vector<double> initial_wealths(const MarketSpec& spec) {
    std::vector<double> w;
    for (const auto& agent : spec.agents) w.push_back(agent.wealth);
    return w;
}

}  // namespace

void check_training_inputs(const MarketSpec& spec, std::span<const TrainingInstance> data) {
    if (homogeneous_kind(spec) != BehaviorKind::log_utility)
        throw DomainError("training undefined for behavior: wealth updates need a homogeneous "
                          "log_utility market");
    for (const auto& agent : spec.agents) {
        if (!agent.full_scope())
            throw DomainError("training undefined for marginal agent " + agent.id);
        if (!(agent.wealth > 0.0))
            throw DomainError("initial wealth of " + agent.id + " must be positive");
    }
    const std::size_t goods = spec.space.num_goods();
    for (std::size_t t = 0; t < data.size(); ++t) {
        const auto& inst = data[t];
        const std::string where = "instance " + std::to_string(t + 1);
        if (inst.beliefs.size() != spec.agents.size())
            throw DomainError(where + ": " + std::to_string(inst.beliefs.size()) + " belief rows for " +
                              std::to_string(spec.agents.size()) + " agents");
        if (inst.label >= goods)
            throw DomainError(where + ": label " + std::to_string(inst.label) + " out of range");
        for (const auto& row : inst.beliefs)
            if (row.size() != goods || !on_simplex(row.values(), kBeliefTolerance))
                throw DomainError(where + ": belief row is not a distribution over " +
                                  std::to_string(goods) + " goods");
    }
}

WealthTrace train_online(const MarketSpec& spec, std::span<const TrainingInstance> data) {
    check_training_inputs(spec, data);
    WealthTrace trace;
    trace.steps.push_back({initial_wealths(spec), {}, 0.0});

    for (std::size_t t = 0; t < data.size(); ++t) {
        const auto& inst = data[t];
        const auto& current = trace.steps.back().wealths;
        auto cleared = solve_analytic(instance_market(spec, inst, current));
        const double c = label_price(cleared.prices, inst.label, t + 1);

        std::vector<double> next(current.size());
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = current[i] * inst.beliefs[i][inst.label] / c;
        trace.steps.push_back({std::move(next), std::move(cleared.prices), c});
    }
    return trace;
}

WealthTrace train_batch(const MarketSpec& spec, std::span<const TrainingInstance> data) {
    check_training_inputs(spec, data);
    const auto w0 = initial_wealths(spec);
    const std::size_t agents = w0.size();
    const std::size_t T = data.size();

    WealthTrace trace;
    trace.steps.push_back({w0, {}, 0.0});
    if (T == 0) return trace;

    // Every instance is priced at the initial wealths, so the pieces are
    // independent. ratios is T x agents, row t = P_i(k_t) / c_{k_t}.
    std::vector<double> ratios(T * agents);
    std::vector<PriceVector> prices(T);
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t st = 0; st < static_cast<std::ptrdiff_t>(T); ++st) {
        const auto t = static_cast<std::size_t>(st);
        try {
            prices[t] = solve_analytic(instance_market(spec, data[t], w0)).prices;
            const double c = label_price(prices[t], data[t].label, t + 1);
            for (std::size_t i = 0; i < agents; ++i)
                ratios[t * agents + i] = data[t].beliefs[i][data[t].label] / c;
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    // Ordered prefix sums give the trace; the last one is the batch formula.
    std::vector<double> settled(agents, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<double> w(agents);
        for (std::size_t i = 0; i < agents; ++i) {
            settled[i] += ratios[t * agents + i];
            const double piece = w0[i] / static_cast<double>(T);
            w[i] = piece * settled[i] + piece * static_cast<double>(T - t - 1);
        }
        trace.steps.push_back({std::move(w), prices[t], prices[t][data[t].label]});
    }
    // Exact batch formula for the final entry, free of the unsettled-piece term.
    for (std::size_t i = 0; i < agents; ++i)
        trace.steps.back().wealths[i] = w0[i] / static_cast<double>(T) * settled[i];
    return trace;
}

std::vector<double> bayesian_posterior(std::span<const double> prior,
                                       std::span<const TrainingInstance> data) {
    const std::size_t agents = prior.size();
    if (agents == 0) throw DomainError("bayesian_posterior: empty prior");
    for (double p : prior)
        if (!(p > 0.0)) throw DomainError("bayesian_posterior: prior weights must be positive");
    if (std::abs(sum(prior) - 1.0) > 1e-9) throw DomainError("bayesian_posterior: prior must sum to 1");
    for (std::size_t t = 0; t < data.size(); ++t)
        if (data[t].beliefs.size() != agents)
            throw DomainError("bayesian_posterior: instance " + std::to_string(t + 1) +
                              " has the wrong number of belief rows");

    // T x agents matrix of log-likelihoods, summed per agent in instance order.
    const std::size_t T = data.size();
    std::vector<double> loglik(T * agents);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t i = 0; i < agents; ++i) {
            const auto& row = data[t].beliefs[i];
            if (data[t].label >= row.size())
                throw DomainError("bayesian_posterior: label out of range at instance " +
                                  std::to_string(t + 1));
            const double p = row[data[t].label];
            loglik[t * agents + i] = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
        }
    auto logpost = column_sums_parallel(loglik, T, agents);
    for (std::size_t i = 0; i < agents; ++i) logpost[i] += std::log(prior[i]);

    const double top = *std::max_element(logpost.begin(), logpost.end());
    if (!std::isfinite(top)) throw DegenerateDataError("every agent has zero likelihood on the data");
    std::vector<double> post(agents);
    for (std::size_t i = 0; i < agents; ++i) post[i] = std::exp(logpost[i] - top);
    return normalized(post);
}

std::vector<double> normalized(std::span<const double> weights) {
    const double total = sum(weights);
    if (!(total > 0.0)) throw DomainError("cannot normalize weights with nonpositive sum");
    std::vector<double> out(weights.begin(), weights.end());
    for (double& x : out) x /= total;
    return out;
}

}  // namespace pmarket
