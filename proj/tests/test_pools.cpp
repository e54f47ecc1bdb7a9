#include <doctest.h>

#include "pmarket/errors.hpp"
#include "pmarket/pools.hpp"
#include "test_support.hpp"

using namespace pmarket;
using namespace pmarket::pools;
using namespace pmarket::testing;

TEST_CASE("weighted_average_pool") {
    const auto avg = weighted_average_pool({{BeliefVector{0.8, 0.2}, BeliefVector{0.4, 0.6}}, {1.0, 1.0}});
    CHECK(avg[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(avg[1] == doctest::Approx(0.4).epsilon(1e-15));

    const BeliefVector only{0.1, 0.3, 0.6};
    CHECK(weighted_average_pool({{only}, {2.5}}) == only);

    const auto w = weighted_average_pool({{BeliefVector{1.0, 0.0}, BeliefVector{0.0, 1.0}}, {3.0, 1.0}});
    CHECK(w.vec() == std::vector<double>{0.75, 0.25});

    CHECK_THROWS_AS(weighted_average_pool({{only, only}, {0.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(weighted_average_pool({{only, only}, {1.0}}), DomainError);
    CHECK_THROWS_AS(weighted_average_pool({{only, BeliefVector{0.5, 0.5}}, {1.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(weighted_average_pool({{}, {}}), DomainError);
}

TEST_CASE("product_pool") {
    const std::vector<BeliefVector> sym{BeliefVector{0.8, 0.2}, BeliefVector{0.2, 0.8}};
    CHECK(product_pool(sym, 0.5)[0] == doctest::Approx(0.5).epsilon(1e-15));

    const std::vector<BeliefVector> single{BeliefVector{0.1, 0.3, 0.6}};
    const auto same = product_pool(single, 1.0);
    CHECK(max_abs_diff(same.values(), single[0].values()) < 1e-15);

    const std::vector<BeliefVector> skew{BeliefVector{0.5, 0.5}, BeliefVector{0.98, 0.02}};
    const auto p = product_pool(skew, 0.5);
    CHECK(p[0] == doctest::Approx(0.875).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.125).epsilon(1e-14));

    const std::vector<BeliefVector> disjoint{BeliefVector{1.0, 0.0}, BeliefVector{0.0, 1.0}};
    CHECK_THROWS_AS(product_pool(disjoint, 0.5), DegenerateDataError);
    CHECK_THROWS_AS(product_pool(sym, 0.0), DomainError);
}

TEST_CASE("gated_pool") {
    const std::vector<BeliefVector> experts{BeliefVector{0.6, 0.4}, BeliefVector{0.2, 0.8}};
    CHECK(gated_pool(std::vector<double>{1.0, 0.0}, experts) == experts[0]);

    const auto plain = gated_pool(std::vector<double>{0.5, 0.5}, experts);
    CHECK(plain[0] == doctest::Approx(0.4).epsilon(1e-15));

    const auto mixed = gated_pool(std::vector<double>{0.9, 0.1}, experts);
    CHECK(mixed[0] == doctest::Approx(0.56).epsilon(1e-14));
    CHECK(mixed[1] == doctest::Approx(0.44).epsilon(1e-14));
}

TEST_CASE("pool outputs are distributions") {
    Rng rng(83);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t agents = uniform_int(rng, 1, 6), goods = uniform_int(rng, 2, 8);
        std::vector<BeliefVector> beliefs;
        std::vector<double> weights;
        for (std::size_t i = 0; i < agents; ++i) {
            beliefs.push_back(random_belief(rng, goods));
            weights.push_back(uniform(rng, 0.0, 3.0));
        }
        CHECK(on_simplex(weighted_average_pool({beliefs, weights}).values(), 1e-12));
        CHECK(on_simplex(product_pool(beliefs, uniform(rng, 0.1, 2.0)).values(), 1e-12));
        CHECK(on_simplex(gated_pool(weights, beliefs).values(), 1e-12));
    }
}
