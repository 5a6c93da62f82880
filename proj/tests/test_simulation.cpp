#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>

#include "srslab/simulation.hpp"

#include "util.hpp"

using namespace srslab;

TEST_CASE("srswor_sample draws each unit uniformly") {
    std::mt19937_64 rng(1234);
    std::array<int, 5> hits{};
    const int reps = 100000;
    for (int i = 0; i < reps; ++i) {
        const auto idx = srswor_sample(rng, 5, 1);
        REQUIRE(idx.size() == 1);
        ++hits[static_cast<std::size_t>(idx[0])];
    }
    for (int h : hits)
        CHECK(static_cast<double>(h) / reps == Catch::Approx(0.2).margin(0.01));
}

TEST_CASE("srswor_sample yields distinct indices") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 200; ++rep) {
        auto idx = srswor_sample(rng, 10, 6);
        std::sort(idx.begin(), idx.end());
        CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
    }
}

TEST_CASE("exactness bridge: MSE of the sample mean is Ybar^2 V200") {
    std::mt19937_64 rng(42);
    const Population pop = testutil::random_population(rng, 8);
    const int n = 3;
    // t1 with both exponents zero is the plain sample mean
    const SimResult r = enumerate_exact(pop, PowerRatioSpec{0.0, 0.0}, n);
    const MomentTable moments = compute_moments(pop);
    const LCoefficients L(pop.size(), n);
    const double v200 = v_closed_form(moments, L, pop.means(), Index3{2, 0, 0});
    const double expected = pop.means().y * pop.means().y * v200;
    CHECK(r.mse == Catch::Approx(expected).epsilon(1e-12));
    CHECK(r.bias == Catch::Approx(0.0).margin(1e-10));
    CHECK(r.method == SimMethod::Enumeration);
}

TEST_CASE("hand enumeration of the classical ratio on N = 4, n = 2") {
    const Population pop({2, 4, 6, 8}, {1, 2, 3, 4}, {5, 5, 5, 5});
    const WeightedRatioSpec spec{1.0, 0.0};  // pure x-ratio
    const SimResult r = enumerate_exact(pop, EstimatorSpec{spec}, 2);

    // all C(4,2) = 6 samples by hand
    double sum = 0.0, sumsq = 0.0;
    const double Xbar = 2.5, Ybar = 5.0;
    const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (const auto& pr : pairs) {
        const double yb = (pop.y()[static_cast<std::size_t>(pr[0])] +
                           pop.y()[static_cast<std::size_t>(pr[1])]) / 2.0;
        const double xb = (pop.x()[static_cast<std::size_t>(pr[0])] +
                           pop.x()[static_cast<std::size_t>(pr[1])]) / 2.0;
        const double t = yb * Xbar / xb;
        sum += t - Ybar;
        sumsq += (t - Ybar) * (t - Ybar);
    }
    CHECK(r.bias == Catch::Approx(sum / 6.0).epsilon(1e-14));
    CHECK(r.mse == Catch::Approx(sumsq / 6.0).epsilon(1e-14));
}

TEST_CASE("enumeration refuses to exceed its budget") {
    std::mt19937_64 rng(3);
    const Population pop = testutil::random_population(rng, 12);
    CHECK_THROWS_AS(enumerate_exact(pop, PowerRatioSpec{1.0, 0.0}, 6, 100), NumericError);
}

TEST_CASE("Monte Carlo lands near the enumeration truth") {
    std::mt19937_64 rng(17);
    const Population pop = testutil::random_population(rng, 10);
    const int n = 4;
    const EstimatorSpec spec = PowerRatioSpec{1.0, 0.5};
    const SimResult exact = enumerate_exact(pop, spec, n);
    const SimResult mc = monte_carlo(pop, spec, n, 50000, 20240817);
    CHECK(std::abs(mc.bias - exact.bias) <= 3.0 * mc.bias_std_error);
    CHECK(std::abs(mc.mse - exact.mse) <= 3.0 * mc.mse_std_error);
    CHECK(mc.failures == 0);
    CHECK(mc.rng == "mt19937_64/splitmix64-sharded");
}

TEST_CASE("Monte Carlo is bit-identical across worker counts") {
    std::mt19937_64 rng(23);
    const Population pop = testutil::random_population(rng, 11);
    const EstimatorSpec spec = ExpRatioSpec{1.0, 1.0};
    const SimResult w1 = monte_carlo(pop, spec, 4, 20000, 555, 1);
    const SimResult w2 = monte_carlo(pop, spec, 4, 20000, 555, 2);
    const SimResult w8 = monte_carlo(pop, spec, 4, 20000, 555, 8);
    CHECK(w1.bias == w2.bias);
    CHECK(w1.bias == w8.bias);
    CHECK(w1.mse == w2.mse);
    CHECK(w1.mse == w8.mse);
    CHECK(w1.bias_std_error == w8.bias_std_error);
    CHECK(w1.mse_std_error == w8.mse_std_error);
}

TEST_CASE("Monte Carlo argument validation") {
    std::mt19937_64 rng(2);
    const Population pop = testutil::random_population(rng, 6);
    const EstimatorSpec spec = PowerRatioSpec{1.0, 0.0};
    CHECK_THROWS_AS(monte_carlo(pop, spec, 0, 100, 1), NumericError);
    CHECK_THROWS_AS(monte_carlo(pop, spec, 2, 0, 1), NumericError);
    CHECK_THROWS_AS(monte_carlo(pop, spec, 2, 100, 1, 0), ConfigError);
}
