#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>
#include <vector>

#include "srslab/estimators.hpp"

#include "util.hpp"

using namespace srslab;

namespace {

std::vector<int> all_indices(int N) {
    std::vector<int> idx(static_cast<std::size_t>(N));
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

std::vector<EstimatorSpec> sample_specs() {
    DualTransformSpec t5;
    t5.k1 = 0.7;
    t5.k2 = 0.3;
    t5.delta1 = -1;
    t5.delta2 = 1;
    return {
        PowerRatioSpec{1.0, 0.5},
        WeightedRatioSpec{0.4, 0.6},
        CombinedRatioSpec{0.3, 0.7, 2.0},
        ExpRatioSpec{1.0, -0.5},
        t5,
    };
}

}  // namespace

TEST_CASE("census sample reproduces the population mean") {
    std::mt19937_64 rng(99);
    const Population pop = testutil::random_population(rng, 9);
    const auto idx = all_indices(pop.size());
    const SampleView full(pop, idx);
    for (const auto& spec : sample_specs()) {
        INFO(to_string(family_of(spec)));
        CHECK(evaluate(spec, full, pop) ==
              Catch::Approx(pop.means().y).epsilon(1e-12));
    }
}

TEST_CASE("t2 hand-computed value") {
    // means: Ybar = 6, Xbar = 3, Zbar = 5; sample {0,1}: ybar 6, xbar 2, zbar 5
    const Population pop({4, 8, 6, 6}, {2, 2, 4, 4}, {5, 5, 5, 5});
    const std::vector<int> idx{0, 1};
    const SampleView s(pop, idx);
    const WeightedRatioSpec spec{0.5, 0.5};
    // 6 * (0.5 * 3/2 + 0.5 * 5/5) = 7.5
    CHECK(evaluate(EstimatorSpec{spec}, s, pop) == Catch::Approx(7.5));
}

TEST_CASE("scale equivariance in y, invariance in the auxiliaries") {
    std::mt19937_64 rng(4);
    const Population pop = testutil::random_population(rng, 8);
    std::vector<double> y2, x2, z2;
    for (int i = 0; i < pop.size(); ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        // t3 mixes the two auxiliary scales, so it is only invariant under a
        // common rescaling of x and z; the other families are per-column
        y2.push_back(2.5 * pop.y()[k]);
        x2.push_back(7.0 * pop.x()[k]);
        z2.push_back(7.0 * pop.z()[k]);
    }
    const Population scaled(std::move(y2), std::move(x2), std::move(z2));
    const std::vector<int> idx{0, 2, 5};
    const SampleView s1(pop, idx);
    const SampleView s2(scaled, idx);
    for (const auto& spec : sample_specs()) {
        INFO(to_string(family_of(spec)));
        CHECK(evaluate(spec, s2, scaled) ==
              Catch::Approx(2.5 * evaluate(spec, s1, pop)).epsilon(1e-12));
    }
}

TEST_CASE("t5 with both deltas zero degenerates to the sample mean") {
    std::mt19937_64 rng(12);
    const Population pop = testutil::random_population(rng, 6);
    const std::vector<int> idx{1, 3};
    const SampleView s(pop, idx);
    DualTransformSpec spec;
    spec.delta1 = 0;
    spec.delta2 = 0;
    CHECK(evaluate(EstimatorSpec{spec}, s, pop) == Catch::Approx(s.ybar()));
}

TEST_CASE("spec validation catches broken invariants") {
    CHECK(validate_spec(WeightedRatioSpec{0.4, 0.7}).size() == 1);
    CHECK(validate_spec(CombinedRatioSpec{0.5, 0.5, 3.0}).empty());

    DualTransformSpec bad;
    bad.c = 1.0;
    bad.d = 1.0;
    bad.delta1 = 2;
    const auto violations = validate_spec(EstimatorSpec{bad});
    CHECK(violations.size() == 2);
    CHECK_THROWS_AS(require_valid(EstimatorSpec{bad}), NumericError);
}

TEST_CASE("negative ratio base with fractional exponent is rejected") {
    // Xbar = -2/3; sample {1,2} has xbar = 1, so Xbar/xbar < 0
    const Population pop({5, 5, 5}, {-4, 1, 1}, {3, 3, 3});
    const std::vector<int> idx{1, 2};
    const SampleView s(pop, idx);
    const PowerRatioSpec spec{0.5, 0.0};
    CHECK_THROWS_AS(evaluate(EstimatorSpec{spec}, s, pop), NumericError);
}

TEST_CASE("sample view rejects duplicates and bad indices") {
    std::mt19937_64 rng(1);
    const Population pop = testutil::random_population(rng, 5);
    const std::vector<int> dup{0, 0};
    CHECK_THROWS_AS(SampleView(pop, dup), NumericError);
    const std::vector<int> oob{0, 9};
    CHECK_THROWS_AS(SampleView(pop, oob), NumericError);
}
