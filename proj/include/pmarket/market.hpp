#pragma once

#include <string>
#include <vector>

#include "pmarket/behavior_spec.hpp"
#include "pmarket/outcome_space.hpp"
#include "pmarket/vectors.hpp"

namespace pmarket {

/// Tolerance on belief normalization at load time.
inline constexpr double kBeliefTolerance = 1e-12;

struct Agent {
    std::string id;
    double wealth = 0.0;
    /// Over the full space, or over the joint outcomes of `subspace`.
    BeliefVector belief;
    /// Variable names the belief is defined on; empty means the full space.
    std::vector<std::string> subspace;
    BehaviorSpec behavior;

    bool full_scope() const noexcept { return subspace.empty(); }

    friend bool operator==(const Agent&, const Agent&) = default;
};

struct MarketSpec {
    OutcomeSpace space;
    std::vector<Agent> agents;

    friend bool operator==(const MarketSpec&, const MarketSpec&) = default;
};

/// Number of outcomes the agent's belief ranges over. Throws DomainError on
/// an invalid subspace.
std::size_t scope_size(const OutcomeSpace& space, const Agent& agent);

/// Every broken invariant of the spec, one human-readable line each, naming
/// the agent and field. Empty iff the market is well formed.
std::vector<std::string> validate_market(const MarketSpec& spec);

/// Copy with every belief divided by its sum. Apply once, after validation.
MarketSpec renormalized(MarketSpec spec);

/// Common behavior kind of all agents, or nullopt for an inhomogeneous market.
std::optional<BehaviorKind> homogeneous_kind(const MarketSpec& spec);

double total_wealth(const MarketSpec& spec);

}  // namespace pmarket
