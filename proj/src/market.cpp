#include "pmarket/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pmarket/errors.hpp"

namespace pmarket {

bool on_simplex(std::span<const double> p, double tol) {
    double total = 0.0;
    for (double x : p) {
        if (!std::isfinite(x) || x < 0.0) return false;
        total += x;
    }
    return std::abs(total - 1.0) <= tol;
}

std::string_view to_string(BehaviorKind kind) noexcept {
    switch (kind) {
        case BehaviorKind::log_utility: return "log_utility";
        case BehaviorKind::exp_utility: return "exp_utility";
        case BehaviorKind::isoelastic_utility: return "isoelastic_utility";
        case BehaviorKind::constant_bet: return "constant_bet";
        case BehaviorKind::linear_bet: return "linear_bet";
        case BehaviorKind::aggressive_bet: return "aggressive_bet";
    }
    return "unknown";
}

std::optional<BehaviorKind> parse_behavior_kind(std::string_view name) noexcept {
    for (auto kind : {BehaviorKind::log_utility, BehaviorKind::exp_utility,
                      BehaviorKind::isoelastic_utility, BehaviorKind::constant_bet,
                      BehaviorKind::linear_bet, BehaviorKind::aggressive_bet}) {
        if (to_string(kind) == name) return kind;
    }
    return std::nullopt;
}

std::size_t scope_size(const OutcomeSpace& space, const Agent& agent) {
    if (agent.full_scope()) return space.num_goods();
    return space.subspace(agent.subspace).num_goods();
}

namespace {

void check_subspace(const OutcomeSpace& space, const Agent& agent,
                    std::vector<std::string>& out) {
    std::set<std::string> seen;
    for (const auto& name : agent.subspace) {
        if (!seen.insert(name).second)
            out.push_back("subspace of " + agent.id + " repeats variable '" + name + "'");
        bool known = false;
        for (const auto& v : space.variables()) known = known || v.name == name;
        if (!known) out.push_back("subspace of " + agent.id + " names unknown variable '" + name + "'");
    }
}

}  // namespace

std::vector<std::string> validate_market(const MarketSpec& spec) {
    std::vector<std::string> out;
    if (spec.agents.empty()) {
        out.emplace_back("market has no agents");
        return out;
    }

    std::set<std::string> ids;
    bool any_utility = false;
    bool any_betting = false;
    bool any_proportional = false;
    bool any_positive_wealth = false;

    for (const auto& agent : spec.agents) {
        const std::string& a = agent.id;
        if (a.empty()) out.emplace_back("agent with empty id");
        if (!ids.insert(a).second) out.push_back("duplicate agent id " + a);

        if (!std::isfinite(agent.wealth)) out.push_back("wealth of " + a + " not finite");
        else if (agent.wealth < 0.0) out.push_back("wealth of " + a + " negative");
        else if (agent.wealth > 0.0) any_positive_wealth = true;

        const auto kind = agent.behavior.kind;
        any_utility = any_utility || is_utility(kind);
        any_betting = any_betting || is_betting(kind);
        any_proportional = any_proportional || is_wealth_proportional(kind);

        if (kind == BehaviorKind::isoelastic_utility &&
            !(agent.behavior.eta > 0.0 && std::isfinite(agent.behavior.eta)))
            out.push_back("eta of " + a + " must be positive");
        if (kind == BehaviorKind::aggressive_bet &&
            !(agent.behavior.epsilon > 0.0 && agent.behavior.epsilon <= 1.0))
            out.push_back("epsilon of " + a + " must lie in (0, 1]");

        std::size_t expected = spec.space.num_goods();
        if (!agent.full_scope()) {
            const auto before = out.size();
            check_subspace(spec.space, agent, out);
            if (out.size() != before) continue;
            expected = scope_size(spec.space, agent);
            if (is_betting(kind)) out.push_back("betting agent " + a + " cannot hold a subspace belief");
        }

        const auto& p = agent.belief;
        if (p.size() != expected) {
            out.push_back("belief of " + a + " has " + std::to_string(p.size()) +
                          " entries, expected " + std::to_string(expected));
            continue;
        }
        bool entries_ok = true;
        for (double x : p) entries_ok = entries_ok && std::isfinite(x) && x >= 0.0;
        if (!entries_ok) out.push_back("belief of " + a + " has a negative or non-finite entry");
        else if (std::abs(sum(p.values()) - 1.0) > kBeliefTolerance)
            out.push_back("belief of " + a + " does not sum to 1");
    }

    if (any_utility && any_betting)
        out.emplace_back("market mixes betting and utility agents; no joint clearing rule");
    if (any_proportional && !any_positive_wealth)
        out.emplace_back("no agent has positive wealth");
    return out;
}

MarketSpec renormalized(MarketSpec spec) {
    for (auto& agent : spec.agents) {
        std::vector<double> p = agent.belief.vec();
        const double total = sum(p);
        // Sums within rounding noise of 1 are left alone, which keeps the
        // operation idempotent.
        if (!(total > 0.0) || std::abs(total - 1.0) <= 64 * std::numeric_limits<double>::epsilon()) continue;
        for (double& x : p) x /= total;
        // Fold the rounding residue into the largest entry.
        const auto largest = std::max_element(p.begin(), p.end());
        for (int pass = 0; pass < 4; ++pass) {
            const double residue = 1.0 - sum(p);
            if (residue == 0.0) break;
            *largest += residue;
        }
        agent.belief = BeliefVector(std::move(p));
    }
    return spec;
}

std::optional<BehaviorKind> homogeneous_kind(const MarketSpec& spec) {
    if (spec.agents.empty()) return std::nullopt;
    const auto kind = spec.agents.front().behavior.kind;
    for (const auto& agent : spec.agents)
        if (agent.behavior.kind != kind) return std::nullopt;
    return kind;
}

double total_wealth(const MarketSpec& spec) {
    double total = 0.0;
    for (const auto& agent : spec.agents) total += agent.wealth;
    return total;
}

}  // namespace pmarket
