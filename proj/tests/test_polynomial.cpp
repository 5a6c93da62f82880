#include <catch2/catch_amalgamated.hpp>

#include "srslab/polynomial.hpp"
#include "srslab/taylor.hpp"

using namespace srslab;

namespace {
const Means kMeans{100.0, 80.0, 60.0};
}

TEST_CASE("TriPoly arithmetic truncates at its degree") {
    const TriPoly e1 = TriPoly::variable(1, 2);
    const TriPoly p = (e1 * e1) * e1;  // degree 3 > max 2, must vanish
    CHECK(p.terms().empty());

    TriPoly q(3);
    q.add_term({1, 1, 0}, 2.0);
    q.add_term({1, 1, 0}, -2.0);
    CHECK(q.terms().empty());  // exact cancellation removes the key
}

TEST_CASE("pow_one_plus reproduces binomial coefficients") {
    const TriPoly e1 = TriPoly::variable(1, 4);
    const TriPoly p = pow_one_plus(e1, -2.0);
    CHECK(p.coeff(0, 0, 0) == Catch::Approx(1.0));
    CHECK(p.coeff(0, 1, 0) == Catch::Approx(-2.0));
    CHECK(p.coeff(0, 2, 0) == Catch::Approx(3.0));
    CHECK(p.coeff(0, 3, 0) == Catch::Approx(-4.0));
    CHECK(p.coeff(0, 4, 0) == Catch::Approx(5.0));

    TriPoly bad = TriPoly::constant(0.5, 4);
    CHECK_THROWS_AS(pow_one_plus(bad, 2.0), NumericError);
}

TEST_CASE("exp_series reproduces factorial coefficients") {
    const TriPoly e2 = TriPoly::variable(2, 4);
    const TriPoly p = exp_series(e2);
    CHECK(p.coeff(0, 0, 1) == Catch::Approx(1.0));
    CHECK(p.coeff(0, 0, 2) == Catch::Approx(0.5));
    CHECK(p.coeff(0, 0, 3) == Catch::Approx(1.0 / 6.0));
    CHECK(p.coeff(0, 0, 4) == Catch::Approx(1.0 / 24.0));
}

TEST_CASE("t1 deviation expansion, first order") {
    const PowerRatioSpec spec{1.5, -0.5};
    const TriPoly dev = expand_deviation(spec, kMeans, 1);
    CHECK(dev.coeff(0, 0, 0) == 0.0);
    CHECK(dev.coeff(1, 0, 0) == Catch::Approx(1.0));
    CHECK(dev.coeff(0, 1, 0) == Catch::Approx(-1.5));
    CHECK(dev.coeff(0, 0, 1) == Catch::Approx(0.5));
}

TEST_CASE("classical ratio expansion, second order") {
    // t1 with alpha1 = 1, alpha2 = 0: (1+e0)(1+e1)^-1 - 1
    const PowerRatioSpec spec{1.0, 0.0};
    const TriPoly dev = expand_deviation(spec, kMeans, 2);
    CHECK(dev.coeff(1, 0, 0) == Catch::Approx(1.0));
    CHECK(dev.coeff(0, 1, 0) == Catch::Approx(-1.0));
    CHECK(dev.coeff(0, 2, 0) == Catch::Approx(1.0));
    CHECK(dev.coeff(1, 1, 0) == Catch::Approx(-1.0));
    CHECK(dev.coeff(0, 0, 1) == 0.0);
}

TEST_CASE("t5 with delta1 = 1 is exactly linear in e1") {
    DualTransformSpec spec;
    spec.k1 = 0.6;
    spec.k2 = 0.4;
    spec.delta1 = 1;
    spec.delta2 = 1;
    const TriPoly dev = expand_deviation(spec, kMeans, 4);
    const double eta = spec.eta1();
    CHECK(dev.coeff(0, 1, 0) == Catch::Approx(-0.6 * eta));
    CHECK(dev.coeff(0, 2, 0) == 0.0);  // (1 - eta e1)^1 has no quadratic part
    CHECK(dev.coeff(0, 3, 0) == 0.0);
    CHECK(dev.coeff(0, 0, 1) == Catch::Approx(-0.4));
    CHECK(dev.coeff(0, 0, 2) == 0.0);
}

TEST_CASE("t4 expansion matches the closed first-order coefficients") {
    const ExpRatioSpec spec{2.0, 2.0};
    const TriPoly dev = expand_deviation(spec, kMeans, 1);
    // exp(beta (Xbar-xbar)/(Xbar+xbar)) linearizes to -beta/2 e1
    CHECK(dev.coeff(0, 1, 0) == Catch::Approx(-1.0));
    CHECK(dev.coeff(0, 0, 1) == Catch::Approx(-1.0));
}

TEST_CASE("expansion order is validated") {
    CHECK_THROWS_AS(expand_deviation(PowerRatioSpec{1, 1}, kMeans, 0), ConfigError);
    CHECK_THROWS_AS(expand_deviation(PowerRatioSpec{1, 1}, kMeans, 5), ConfigError);
}
