#include "pmarket/pools.hpp"

#include <cmath>
#include <string>

#include "pmarket/errors.hpp"

namespace pmarket::pools {

namespace {

std::size_t common_length(std::span<const BeliefVector> beliefs) {
    if (beliefs.empty()) throw DomainError("pool needs at least one belief");
    const std::size_t n = beliefs.front().size();
    for (const auto& b : beliefs)
        if (b.size() != n) throw DomainError("pooled beliefs have different lengths");
    return n;
}

}  // namespace

BeliefVector weighted_average_pool(const PoolInput& input) {
    const std::size_t n = common_length(input.beliefs);
    if (input.weights.size() != input.beliefs.size())
        throw DomainError("pool has " + std::to_string(input.weights.size()) + " weights for " +
                          std::to_string(input.beliefs.size()) + " beliefs");
    double total = 0.0;
    for (double w : input.weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("pool weights must be nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw DomainError("pool weights are all zero");

    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < input.beliefs.size(); ++i)
        for (std::size_t k = 0; k < n; ++k) out[k] += input.weights[i] * input.beliefs[i][k];
    for (double& x : out) x /= total;
    return BeliefVector(std::move(out));
}

BeliefVector product_pool(std::span<const BeliefVector> beliefs, double exponent) {
    const std::size_t n = common_length(beliefs);
    if (!(exponent > 0.0)) throw DomainError("product pool exponent must be positive");

    std::vector<double> out(n, 1.0);
    for (const auto& b : beliefs)
        for (std::size_t k = 0; k < n; ++k) out[k] *= std::pow(b[k], exponent);
    double z = 0.0;
    for (double x : out) z += x;
    if (!(z > 0.0)) throw DegenerateDataError("product pool vanishes on every outcome");
    for (double& x : out) x /= z;
    return BeliefVector(std::move(out));
}

BeliefVector gated_pool(std::span<const double> gates, std::span<const BeliefVector> beliefs) {
    return weighted_average_pool({{beliefs.begin(), beliefs.end()}, {gates.begin(), gates.end()}});
}

}  // namespace pmarket::pools
