#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "srslab/combinatorics.hpp"
#include "srslab/moments.hpp"

#include "util.hpp"

using namespace srslab;

TEST_CASE("binomial_count basics and saturation") {
    CHECK(binomial_count(4, 2) == 6);
    CHECK(binomial_count(25, 7) == 480700);
    CHECK(binomial_count(5, 0) == 1);
    CHECK(binomial_count(5, 6) == 0);
    CHECK(binomial_count(300, 150) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("for_each_combination visits every subset once, lexicographically") {
    std::vector<std::vector<int>> seen;
    for_each_combination(5, 2, [&](std::span<const int> idx) {
        seen.emplace_back(idx.begin(), idx.end());
    });
    REQUIRE(seen.size() == 10);
    CHECK(seen.front() == std::vector<int>{0, 1});
    CHECK(seen.back() == std::vector<int>{3, 4});
    for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i - 1] < seen[i]);
}

TEST_CASE("central moment of y = (1,2,3) with p = 2") {
    Population pop({1, 2, 3}, {5, 5, 5}, {7, 7, 7});
    CHECK(central_moment(pop, 2, 0, 0) == Catch::Approx(2.0));
    CHECK(central_moment(pop, 1, 0, 0) == Catch::Approx(0.0).margin(1e-14));
    CHECK(central_moment(pop, 0, 2, 0) == 0.0);
}

TEST_CASE("L coefficients are exact rationals") {
    const LCoefficients L(25, 7);
    // (N-n) / ((N-1) n) = 18/168 = 3/28
    CHECK(L.l1().num == 3);
    CHECK(L.l1().den == 28);
    // (N-n)(N-2n) / ((N-1)(N-2) n^2) = 198/27048
    CHECK(L.l2().value() == Catch::Approx(198.0 / 27048.0).epsilon(1e-15));
    // identity check without rounding: L1 * n * (N-1) == N - n
    CHECK(L.l1().num * 7 * 24 == 18 * L.l1().den);

    CHECK_THROWS_AS(LCoefficients(25, 0), NumericError);
    CHECK_THROWS_AS(LCoefficients(3, 2).l3(), NumericError);
}

TEST_CASE("census sample: L1 vanishes, variance terms vanish") {
    const LCoefficients L(10, 10);
    CHECK(L.l1().num == 0);
    CHECK(L.l2().num == 0);
}

TEST_CASE("closed-form V terms match exact enumeration") {
    std::mt19937_64 rng(2024);
    const Population pop = testutil::random_population(rng, 8);
    const int n = 3;
    const MomentTable moments = compute_moments(pop);
    const LCoefficients L(pop.size(), n);

    for (int p = 0; p <= 4; ++p)
        for (int q = 0; p + q <= 4; ++q)
            for (int r = 0; p + q + r <= 4; ++r) {
                const Index3 idx{p, q, r};
                if (!has_closed_form(idx)) continue;
                const double closed = v_closed_form(moments, L, pop.means(), idx);
                const double exact = v_exact(pop, n, idx).value;
                INFO("V" << to_string(idx));
                CHECK(closed == Catch::Approx(exact).epsilon(1e-10).margin(1e-16));
            }
}

TEST_CASE("V terms are invariant under positive rescaling of the columns") {
    std::mt19937_64 rng(7);
    const Population pop = testutil::random_population(rng, 7);
    std::vector<double> y2, x2, z2;
    for (int i = 0; i < pop.size(); ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        y2.push_back(3.0 * pop.y()[k]);
        x2.push_back(0.25 * pop.x()[k]);
        z2.push_back(10.0 * pop.z()[k]);
    }
    const Population scaled(std::move(y2), std::move(x2), std::move(z2));

    const VTable a = build_v_table(pop, 3, VPolicy::EnumerateAll);
    const VTable b = build_v_table(scaled, 3, VPolicy::EnumerateAll);
    for (const auto& [idx, e] : a.entries) {
        INFO("V" << to_string(idx));
        CHECK(b.at(idx.p, idx.q, idx.r) ==
              Catch::Approx(e.value).epsilon(1e-12).margin(1e-18));
    }
}

TEST_CASE("table policies agree on the listed identities") {
    std::mt19937_64 rng(11);
    const Population pop = testutil::random_population(rng, 9);
    const VTable closed = build_v_table(pop, 4, VPolicy::ClosedFormWhereListed);
    const VTable enumd = build_v_table(pop, 4, VPolicy::EnumerateAll);
    for (const auto& [idx, e] : closed.entries) {
        INFO("V" << to_string(idx));
        CHECK(e.value ==
              Catch::Approx(enumd.at(idx.p, idx.q, idx.r)).epsilon(1e-10).margin(1e-16));
        if (has_closed_form(idx)) CHECK(e.provenance == Provenance::ClosedForm);
    }
}

TEST_CASE("first-order V entries are exactly zero") {
    std::mt19937_64 rng(5);
    const Population pop = testutil::random_population(rng, 6);
    const VTable t = build_v_table(pop, 2, VPolicy::EnumerateAll);
    CHECK(t.at(1, 0, 0) == 0.0);
    CHECK(t.at(0, 1, 0) == 0.0);
    CHECK(t.at(0, 0, 1) == 0.0);
    CHECK(v_exact(pop, 2, Index3{1, 0, 0}).value == 0.0);
}

TEST_CASE("VTable access guards") {
    VTable t;
    t.set(2, 0, 0, 0.5, Provenance::LiteralFixture);
    CHECK(t.at(2, 0, 0) == 0.5);
    CHECK_THROWS_AS(t.at(0, 2, 0), NumericError);
    CHECK_THROWS_AS(v_closed_form(MomentTable{}, LCoefficients(8, 3), Means{1, 1, 1},
                                  Index3{1, 1, 1}),
                    NumericError);
}
