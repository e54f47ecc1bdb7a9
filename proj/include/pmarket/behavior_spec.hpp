#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace pmarket {

enum class BehaviorKind {
    log_utility,
    exp_utility,
    isoelastic_utility,
    constant_bet,
    linear_bet,
    aggressive_bet,
};

/// How an agent turns wealth, belief and prices into a position.
struct BehaviorSpec {
    static constexpr double kDefaultEpsilon = 0.05;

    BehaviorKind kind = BehaviorKind::log_utility;
    /// Relative risk aversion; isoelastic only.
    double eta = 1.0;
    /// Width of the linear ramp; aggressive betting only.
    double epsilon = kDefaultEpsilon;

    friend bool operator==(const BehaviorSpec&, const BehaviorSpec&) = default;
};

constexpr bool is_utility(BehaviorKind kind) noexcept {
    return kind == BehaviorKind::log_utility || kind == BehaviorKind::exp_utility ||
           kind == BehaviorKind::isoelastic_utility;
}

constexpr bool is_betting(BehaviorKind kind) noexcept { return !is_utility(kind); }

/// Demand scales with wealth (everything except exponential utility).
constexpr bool is_wealth_proportional(BehaviorKind kind) noexcept {
    return kind != BehaviorKind::exp_utility;
}

std::string_view to_string(BehaviorKind kind) noexcept;
std::optional<BehaviorKind> parse_behavior_kind(std::string_view name) noexcept;

}  // namespace pmarket
