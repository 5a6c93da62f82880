#pragma once

#include <variant>

#include "srslab/estimators.hpp"
#include "srslab/polynomial.hpp"

namespace srslab {

/// Series expansion of (t / Ybar - 1) in the relative errors (e0, e1, e2),
/// truncated at the requested total degree. The coefficients are exact
/// binomial / exponential series values. Population means are needed for
/// the combined-ratio family only (its weighted sum mixes the two
/// auxiliary scales); other families ignore them.
inline TriPoly expand_deviation(const EstimatorSpec& spec, const Means& means,
                                int order) {
    if (order < 1 || order > 4)
        throw ConfigError("expand_deviation: order must be in {1, 2, 3, 4}");
    require_valid(spec);

    const TriPoly e0 = TriPoly::variable(0, order);
    const TriPoly e1 = TriPoly::variable(1, order);
    const TriPoly e2 = TriPoly::variable(2, order);
    const TriPoly one = TriPoly::constant(1.0, order);

    TriPoly rel(order);
    if (const auto* t1 = std::get_if<PowerRatioSpec>(&spec)) {
        rel = (one + e0) * pow_one_plus(e1, -t1->alpha1) * pow_one_plus(e2, -t1->alpha2);
    } else if (const auto* t2 = std::get_if<WeightedRatioSpec>(&spec)) {
        rel = (one + e0) *
              (t2->lambda1 * pow_one_plus(e1, -1.0) + t2->lambda2 * pow_one_plus(e2, -1.0));
    } else if (const auto* t3 = std::get_if<CombinedRatioSpec>(&spec)) {
        const double denom = t3->w1 * means.x + t3->w2 * means.z;
        if (denom == 0.0) throw NumericError("t3: w1*Xbar + w2*Zbar is zero");
        const double lam = 1.0 / denom;
        const TriPoly u = (lam * t3->w1 * means.x) * e1 + (lam * t3->w2 * means.z) * e2;
        rel = (one + e0) * pow_one_plus(u, -t3->alpha);
    } else if (const auto* t4 = std::get_if<ExpRatioSpec>(&spec)) {
        // (Xbar - xbar)/(Xbar + xbar) = -(e/2) (1 + e/2)^{-1}
        const TriPoly g1 = (-0.5) * (e1 * pow_one_plus(0.5 * e1, -1.0));
        const TriPoly g2 = (-0.5) * (e2 * pow_one_plus(0.5 * e2, -1.0));
        rel = (one + e0) * exp_series(t4->beta1 * g1) * exp_series(t4->beta2 * g2);
    } else {
        const auto& t5 = std::get<DualTransformSpec>(spec);
        const TriPoly part_x =
            pow_one_plus((-t5.eta1()) * e1, static_cast<double>(t5.delta1));
        const TriPoly part_z =
            TriPoly::constant(2.0, order) -
            pow_one_plus(e2, static_cast<double>(t5.delta2));
        rel = (one + e0) * (t5.k1 * part_x + t5.k2 * part_z);
    }
    return rel - one;
}

}  // namespace srslab
