#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace pmarket {

/// Immutable vector of doubles tagged with its domain meaning, so beliefs,
/// prices and holdings cannot be passed for one another by accident.
template <class Tag>
class TaggedVector {
public:
    TaggedVector() = default;
    explicit TaggedVector(std::vector<double> values) : values_(std::move(values)) {}
    TaggedVector(std::initializer_list<double> values) : values_(values) {}

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t k) const { return values_[k]; }

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& vec() const noexcept { return values_; }

    friend bool operator==(const TaggedVector&, const TaggedVector&) = default;

private:
    std::vector<double> values_;
};

struct BeliefTag {};
struct PriceTag {};
struct StockholdingTag {};
struct ProportionTag {};

/// Probability distribution held by an agent over the goods of its scope.
using BeliefVector = TaggedVector<BeliefTag>;
/// Price per unit payout of each winner-take-all contract.
using PriceVector = TaggedVector<PriceTag>;
/// Signed contract quantities (negative = sold); currency staked for betting kinds.
using StockholdingVector = TaggedVector<StockholdingTag>;
/// Fraction of wealth a betting agent puts on each good.
using ProportionVector = TaggedVector<ProportionTag>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
}

inline double sum(std::span<const double> a) {
    double acc = 0.0;
    for (double x : a) acc += x;
    return acc;
}

/// True if all entries are finite, nonnegative and sum to one within `tol`.
bool on_simplex(std::span<const double> p, double tol);

}  // namespace pmarket
