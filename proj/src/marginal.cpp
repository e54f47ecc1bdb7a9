#include "pmarket/marginal.hpp"

#include <string>

#include "pmarket/behavior.hpp"
#include "pmarket/errors.hpp"

namespace pmarket {

Projection::Projection(const OutcomeSpace& space, std::span<const std::string> subspace) {
    const OutcomeSpace sub = space.subspace(subspace);
    num_marginal_ = sub.num_goods();

    std::vector<std::size_t> positions;
    for (const auto& name : subspace) positions.push_back(space.position(name));

    index_.resize(space.num_goods());
    std::vector<std::size_t> picked(positions.size());
    for (std::size_t g = 0; g < space.num_goods(); ++g) {
        const auto full = space.assignment(g);
        for (std::size_t j = 0; j < positions.size(); ++j) picked[j] = full[positions[j]];
        index_[g] = sub.good_index(picked);
    }
}

void Projection::marginalize(std::span<const double> full, std::span<double> out) const {
    if (full.size() != index_.size() || out.size() != num_marginal_)
        throw DomainError("marginalize: size mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t g = 0; g < index_.size(); ++g) out[index_[g]] += full[g];
}

void Projection::expand(std::span<const double> marginal, std::span<double> out) const {
    if (marginal.size() != num_marginal_ || out.size() != index_.size())
        throw DomainError("expand: marginal vector has " + std::to_string(marginal.size()) +
                          " entries, subspace has " + std::to_string(num_marginal_) + " outcomes");
    for (std::size_t g = 0; g < index_.size(); ++g) out[g] = marginal[index_[g]];
}

PriceVector marginal_price(const OutcomeSpace& space, const PriceVector& prices,
                           std::span<const std::string> subspace) {
    const Projection proj(space, subspace);
    std::vector<double> out(proj.num_marginal());
    proj.marginalize(prices.values(), out);
    return PriceVector(std::move(out));
}

StockholdingVector expand_stockholding(const OutcomeSpace& space,
                                       std::span<const std::string> subspace,
                                       std::span<const double> marginal_shares) {
    const Projection proj(space, subspace);
    std::vector<double> out(space.num_goods());
    proj.expand(marginal_shares, out);
    return StockholdingVector(std::move(out));
}

StockholdingVector marginal_demand(const OutcomeSpace& space, const Agent& agent,
                                   const PriceVector& prices) {
    if (!is_utility(agent.behavior.kind))
        throw DomainError("marginal_demand: betting agent " + agent.id + " has no marginal behavior");
    if (agent.full_scope()) return demand(agent, prices);

    const Projection proj(space, agent.subspace);
    std::vector<double> mprices(proj.num_marginal());
    proj.marginalize(prices.values(), mprices);
    std::vector<double> mshares(proj.num_marginal());
    demand_into(agent.behavior, agent.wealth, agent.belief.values(), mprices, mshares);
    std::vector<double> out(space.num_goods());
    proj.expand(mshares, out);
    return StockholdingVector(std::move(out));
}

StockholdingVector agent_demand(const OutcomeSpace& space, const Agent& agent,
                                const PriceVector& prices) {
    return agent.full_scope() ? demand(agent, prices) : marginal_demand(space, agent, prices);
}

}  // namespace pmarket
