#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "srslab/estimators.hpp"
#include "srslab/moments.hpp"
#include "srslab/polynomial.hpp"
#include "srslab/taylor.hpp"

namespace srslab {

/// AsPublished evaluates the printed expressions verbatim (including
/// their defects, see docs/errata.md); Rederived uses the series
/// expansion machinery and is the default, oracle-validated path.
enum class FormulaMode { AsPublished, Rederived };

inline const char* to_string(FormulaMode m) {
    return m == FormulaMode::AsPublished ? "as-published" : "re-derived";
}

/// Symbols the printed second-order expressions use without defining.
/// AsPublished mode cannot run the affected families unless the caller
/// supplies values for them; Rederived mode never needs them.
struct PublishedGapConstants {
    std::optional<double> t3_a1;     // "A1" in the t3 expression
    std::optional<double> t3_a2;     // "A2" in the t3 expression
    std::optional<double> t3_theta;  // "theta" in the t3 expression
    std::optional<double> t4_s;      // "S" in the t4 expression
    std::optional<double> t5_m2;     // "M2" in the t5 expression
    std::optional<double> t5_n2;     // "N2" in the t5 expression
};

struct ApproxResult {
    Family family = Family::T1;
    int order = 1;
    FormulaMode mode = FormulaMode::Rederived;
    double bias = 0.0;  // order 1 only
    double mse = 0.0;
};

namespace detail {

inline double require_gap(const std::optional<double>& g, const char* name) {
    if (!g)
        throw NumericError(std::string("as-published formula needs undefined symbol ") +
                           name + "; supply it or use re-derived mode");
    return *g;
}

using CoeffMap = std::map<Index3, double>;

inline void acc(CoeffMap& m, int p, int q, int r, double c) {
    if (c != 0.0) m[Index3{p, q, r}] += c;
}

inline double contract(const CoeffMap& m, const VTable& v) {
    double sum = 0.0;
    for (const auto& [idx, c] : m) sum += c * v.at(idx.p, idx.q, idx.r);
    return sum;
}

}  // namespace detail

/// Coefficient map of the printed second-order MSE bracket: the value of
/// MSE2 is Ybar^2 times the contraction of this map against the V table.
inline detail::CoeffMap published_second_order_coefficients(
    const EstimatorSpec& spec, const Means& means,
    const PublishedGapConstants& gaps = {}) {
    using detail::acc;
    detail::CoeffMap m;

    if (const auto* t1 = std::get_if<PowerRatioSpec>(&spec)) {
        const double a1 = t1->alpha1, a2 = t1->alpha2;
        const double R1 = a1 * (a1 + 1) / 2, R2 = a1 * (a1 + 1) * (a1 + 2) / 6;
        const double S1 = a2 * (a2 + 1) / 2, S2 = a2 * (a2 + 1) * (a2 + 2) / 6;
        acc(m, 2, 0, 0, 1.0);
        acc(m, 0, 2, 0, a1 * a1);
        acc(m, 0, 0, 2, a2 * a2);
        acc(m, 1, 1, 0, -2 * a1);
        acc(m, 1, 0, 1, -2 * a2);
        acc(m, 0, 1, 1, 2 * a1 * a2);
        acc(m, 2, 1, 0, -2 * a1);
        acc(m, 2, 0, 1, -2 * a2);
        acc(m, 1, 2, 0, 2 * R1 + 2 * a1 * a1);
        acc(m, 1, 0, 2, 2 * S1);
        acc(m, 0, 2, 1, -2 * a1 * a1 * a2 + 2 * a2 * (R2 + a1 * R1));
        acc(m, 0, 1, 2, -2 * S1 * a1 - 2 * a1 * (S2 - a2 * S1));
        acc(m, 0, 3, 0, -2 * R1 * a1);
        acc(m, 1, 1, 1, 6 * a1 * a2);
        acc(m, 2, 2, 0, a1 * a1 + 2 * R1);
        acc(m, 2, 0, 2, a2 * a2 + 2 * S1);
        acc(m, 0, 2, 2, a1 * a1 * a2 * a2 + 2 * R1 * S1);
        // printed "6 M1 alpha1"; M1 is undefined for this family, read as R1 (E5)
        acc(m, 1, 2, 1, -(4 * a1 * a1 * a2 + 6 * R1 * a1));
        acc(m, 1, 1, 2, -4 * a1 * (S1 + a2 * a2));
        acc(m, 2, 1, 1, 4 * a1 * a2);
        acc(m, 1, 3, 0, -2 * (R2 + 2 * a1 * R1));
        acc(m, 1, 0, 3, -2 * (S2 + 2 * a2 * S1));
        acc(m, 0, 4, 0, R1 * R1 + 2 * a1 * R2);
        acc(m, 0, 0, 4, S1 * S1 + 2 * a2 * S2);
        return m;
    }

    if (const auto* t2 = std::get_if<WeightedRatioSpec>(&spec)) {
        const double l1 = t2->lambda1, l2 = t2->lambda2;
        acc(m, 2, 0, 0, 1.0);
        const double l1sq = l1 * l1, l2sq = l2 * l2;
        acc(m, 0, 2, 0, l1sq);
        acc(m, 2, 2, 0, l1sq);
        acc(m, 0, 4, 0, 3 * l1sq);
        acc(m, 1, 2, 0, 2 * l1sq);
        acc(m, 0, 3, 0, -2 * l1sq);
        acc(m, 1, 3, 0, -4 * l1sq);
        acc(m, 0, 0, 2, l2sq);
        acc(m, 2, 0, 2, l2sq);
        acc(m, 0, 0, 4, 3 * l2sq);
        acc(m, 1, 0, 2, 2 * l2sq);
        acc(m, 0, 0, 3, -2 * l2sq);
        acc(m, 1, 0, 3, -4 * l2sq);
        acc(m, 1, 1, 0, -2 * l1);
        acc(m, 2, 1, 0, -2 * l1);
        acc(m, 1, 2, 0, 2 * l1);
        acc(m, 2, 2, 0, 2 * l1);
        acc(m, 1, 3, 0, -2 * l1);
        acc(m, 1, 0, 1, -2 * l2);
        acc(m, 2, 0, 1, -2 * l2);
        acc(m, 2, 0, 2, 2 * l2);
        const double cross = 2 * l1 * l2;
        acc(m, 0, 1, 1, cross);
        acc(m, 1, 1, 1, 2 * cross);
        acc(m, 0, 1, 2, -cross);
        acc(m, 1, 1, 2, -2 * cross);
        acc(m, 0, 1, 3, cross);
        acc(m, 2, 1, 1, cross);
        acc(m, 0, 2, 1, -cross);
        acc(m, 1, 2, 1, -2 * cross);
        acc(m, 0, 2, 2, cross);
        acc(m, 0, 3, 1, cross);
        return m;
    }

    if (const auto* t3 = std::get_if<CombinedRatioSpec>(&spec)) {
        const double A1 = detail::require_gap(gaps.t3_a1, "A1 (t3)");
        const double A2 = detail::require_gap(gaps.t3_a2, "A2 (t3)");
        const double th = detail::require_gap(gaps.t3_theta, "theta (t3)");
        const double a = t3->alpha, w1 = t3->w1, w2 = t3->w2;
        const double X1 = means.x, X2 = means.z;
        const double th2 = th * th, th3 = th2 * th, th4 = th2 * th2;
        acc(m, 2, 0, 0, 1.0);
        {
            const double g = w1 * w1 * X1;
            acc(m, 0, 2, 0, g * a * a * th2);
            acc(m, 2, 2, 0, g * a * a * th2);
            acc(m, 1, 2, 0, g * (2 * a * a * th2 + 2 * A1 * th2));
            acc(m, 2, 2, 0, g * 2 * A1 * th2);
        }
        {
            const double g = w2 * w2 * X2;
            acc(m, 0, 0, 2, g * a * a * th2);
            acc(m, 2, 0, 2, g * a * a * th2);
            acc(m, 1, 2, 0, g * (2 * a * a * th2 + 2 * A1 * th2));
            acc(m, 2, 0, 2, g * 2 * A1 * th2);
        }
        {
            const double g = 2 * w1 * w2 * X1 * X2;
            acc(m, 2, 1, 1, g * (a * a * th2 + 2 * A1 * th2));
            acc(m, 1, 1, 1, g * (2 * a * a * th2 + 2 * A1 * th2));
        }
        const double quart = A1 * A1 * th4 + 4 * A2 * a * th4;
        acc(m, 0, 3, 1, 2 * w1 * w1 * w1 * w2 * X1 * X1 * X1 * X2 * quart);
        acc(m, 0, 1, 3, 2 * w1 * w2 * w2 * w2 * X1 * X2 * X2 * X2 * quart);
        acc(m, 1, 1, 0, -2 * a * th * w1 * X1);
        acc(m, 2, 1, 0, -2 * a * th * w1 * X1);
        acc(m, 1, 0, 1, -2 * a * th * w2 * X2);
        acc(m, 2, 0, 1, -2 * a * th * w2 * X2);
        {
            const double g = 3 * w1 * w1 * w2 * X1 * X1 * X2;
            acc(m, 1, 2, 1, g * (-2 * A2 * th3 - 4 * A1 * a * th3));
            acc(m, 0, 1, 2, g * (-2 * A1 * a * th3));
        }
        {
            const double g = 3 * w1 * X1 * w2 * w2 * X2 * X2;
            acc(m, 1, 1, 2, g * (-2 * A2 * th3 - 4 * A1 * a * th3));
            acc(m, 0, 1, 2, g * (-2 * A1 * a * th3));
        }
        acc(m, 0, 4, 0, std::pow(w1 * X1, 4) * (std::pow(A1, 4) * th4 + 2 * A2 * a * th4));
        acc(m, 0, 0, 2, std::pow(w2 * X2, 4) * (std::pow(A1, 4) * th4 + 2 * A2 * a * th4));
        {
            const double g = std::pow(w1 * X1, 3);
            acc(m, 1, 3, 0, g * (-2 * A2 * th3 - 4 * A1 * a * th3));
            acc(m, 0, 3, 0, g * (-2 * A1 * a * th3));
        }
        {
            const double g = std::pow(w2 * X2, 3);
            acc(m, 1, 0, 3, g * (-2 * A2 * th3 - 4 * A1 * a * th3));
            acc(m, 0, 0, 3, g * (-2 * A1 * a * th3));
        }
        acc(m, 0, 2, 2,
            6 * w1 * w1 * X1 * X1 * w2 * w2 * X2 * X2 * (A1 * A1 * th4 + 2 * A2 * a * th4));
        return m;
    }

    if (const auto* t4 = std::get_if<ExpRatioSpec>(&spec)) {
        const double S = detail::require_gap(gaps.t4_s, "S (t4)");
        const double b1 = t4->beta1, b2 = t4->beta2;
        const double M = b1 + b1 * b1 / 2, Nn = b2 + b2 * b2 / 2;
        const double O = b1 * b1 + b1 * b1 * b1 / 6, P = b2 * b2 + b2 * b2 * b2 / 6;
        const double Q = b1 * b2 + b1 * b1 * b2 / 2, R = b1 * b2 + b1 * b2 * b2 / 2;
        acc(m, 2, 0, 0, 1.0);
        acc(m, 0, 2, 0, b1 * b1 / 4);
        acc(m, 0, 0, 2, b2 * b2 / 4);
        acc(m, 1, 1, 0, -b1);
        acc(m, 2, 1, 0, -b1 * (M + b1 * b1 / 4));
        acc(m, 1, 0, 2, 0.5 * (Nn + b2 * b2 / 4));
        acc(m, 0, 2, 1, -(M + b1 * b1 * b2));
        acc(m, 0, 1, 2, -(Nn + b2 * b2 * b1));
        acc(m, 1, 1, 1, 1.5 * b1 * b2);
        acc(m, 0, 1, 1, 0.5 * b1 * b2);
        acc(m, 0, 3, 0, -0.75 * b1 * M);
        acc(m, 0, 0, 3, -0.5 * b2 * Nn);
        acc(m, 2, 2, 0, 0.5 * (M + b1 * b1 / 4));
        acc(m, 2, 0, 2, 0.5 * (Nn + b2 * b2 / 4));
        acc(m, 0, 2, 2, (b1 * b1 * b2 * b2 / 2 + b1 + b2 * Q + M * Nn) / 8);
        acc(m, 1, 3, 0, -(O + 2 * b1 * M) / 4);
        acc(m, 1, 0, 3, -(P + 2 * b2 * Nn) / 4);
        acc(m, 0, 3, 1, (b1 * Q + O + S * M) / 8);
        acc(m, 0, 1, 3, (b2 * R + b1 * P + S * Nn) / 8);
        acc(m, 1, 2, 1, -(Q + 2 * b1 * b1 * b2 + b2 * M) / 4);
        acc(m, 1, 1, 2, -(2 * b2 * b2 * b1 + 2 * b1 * Nn + R) / 4);
        acc(m, 0, 4, 0, -(2 * b1 * O + M * M) / 16);
        acc(m, 0, 0, 4, (2 * b2 * P + Nn * Nn) / 16);
        acc(m, 2, 1, 1, 0.5 * (b1 * b1 * b2 + S));
        return m;
    }

    const auto& t5 = std::get<DualTransformSpec>(spec);
    const double M2 = detail::require_gap(gaps.t5_m2, "M2 (t5)");
    const double N2 = detail::require_gap(gaps.t5_n2, "N2 (t5)");
    const double k1 = t5.k1, k2 = t5.k2;
    const double d1 = t5.delta1, d2 = t5.delta2;
    const double eta = t5.eta1();
    const double M1 = d1 * (d1 - 1) / 2 * eta * eta;
    const double N1 = d2 * (d2 - 1) / 2;
    acc(m, 2, 0, 0, 1.0);
    {
        const double g = k1 * k1;
        const double u2 = d1 * d1 * eta * eta;
        acc(m, 0, 2, 0, g * u2);
        acc(m, 0, 2, 2, g * u2);
        acc(m, 1, 2, 0, g * 2 * u2);
        acc(m, 0, 4, 0, g * (2 * d1 * eta * M1 + M1 * M1));
        acc(m, 0, 3, 0, g * 2 * d1 * eta * (-2 * M1));
    }
    {
        const double g = k2 * k2;
        acc(m, 0, 0, 2, g * d2 * d2);
        acc(m, 2, 0, 2, g * d2 * d2);
        acc(m, 1, 0, 2, g * 2 * d2 * d2);
        acc(m, 1, 0, 3, g * 2 * d2 * N1);
        acc(m, 0, 3, 0, g * 2 * d2 * N1);
        acc(m, 0, 0, 4, g * (2 * d2 * N2 + N1 * N1));
    }
    acc(m, 1, 1, 0, -2 * k1 * d1 * eta);
    acc(m, 2, 1, 0, -2 * k1 * d1 * eta);
    acc(m, 1, 2, 0, 2 * k1 * M1);
    acc(m, 2, 2, 0, 2 * k1 * M1);
    acc(m, 1, 3, 0, -2 * k1 * M2);
    acc(m, 1, 0, 1, -2 * k2 * d2);
    acc(m, 2, 0, 1, -2 * k2 * d2);
    acc(m, 1, 0, 2, -2 * k2 * N1);
    acc(m, 2, 0, 2, -2 * k2 * N1);
    acc(m, 1, 0, 3, -2 * k2 * N2);
    {
        const double g = 2 * k1 * k2;
        acc(m, 0, 1, 1, g * d1 * d2 * eta);
        acc(m, 1, 1, 1, 2 * g * d1 * d2 * eta);
        acc(m, 2, 1, 1, g * d1 * d2 * eta);
        acc(m, 0, 1, 2, g * d1 * eta * N1);
        acc(m, 0, 1, 3, g * d1 * eta * N2);
    }
    return m;
}

/// Coefficient map of the re-derived second-order bracket: the square of
/// the degree-4 expansion of (t/Ybar - 1), truncated at total degree 4.
inline detail::CoeffMap rederived_second_order_coefficients(const EstimatorSpec& spec,
                                                            const Means& means) {
    const TriPoly dev = expand_deviation(spec, means, 4);
    const TriPoly sq = dev * dev;  // multiplication truncates above degree 4
    return sq.terms();
}

/// First-order bias, Ybar times the bracket of the printed expression
/// (as-published) or of the degree-2 expansion (re-derived).
inline double first_order_bias(const EstimatorSpec& spec, const VTable& v,
                               const Means& means,
                               FormulaMode mode = FormulaMode::Rederived) {
    require_valid(spec);
    if (mode == FormulaMode::Rederived) {
        const TriPoly dev = expand_deviation(spec, means, 2);
        return means.y * dev.expectation(v);
    }

    using detail::acc;
    detail::CoeffMap m;
    if (const auto* t1 = std::get_if<PowerRatioSpec>(&spec)) {
        const double a1 = t1->alpha1, a2 = t1->alpha2;
        acc(m, 1, 1, 0, -a1);
        acc(m, 1, 0, 2, a2);  // printed "+alpha2 V102"; re-derivation gives -alpha2 V101 (E4)
        acc(m, 0, 2, 0, a1 * (a1 + 1) / 2);
        acc(m, 0, 0, 2, a2 * (a2 + 1) / 2);
        acc(m, 0, 1, 1, a1 * a2);
    } else if (const auto* t2 = std::get_if<WeightedRatioSpec>(&spec)) {
        acc(m, 1, 1, 0, -t2->lambda1);
        acc(m, 1, 0, 1, -t2->lambda2);
        acc(m, 0, 2, 0, t2->lambda1);
        acc(m, 0, 0, 2, t2->lambda2);
        // the printed alpha1*alpha2*V011 term names parameters this family
        // does not have; dropped here (E6)
    } else if (const auto* t3 = std::get_if<CombinedRatioSpec>(&spec)) {
        const double denom = t3->w1 * means.x + t3->w2 * means.z;
        if (denom == 0.0) throw NumericError("t3: w1*Xbar + w2*Zbar is zero");
        const double lam = 1.0 / denom;
        const double a = t3->alpha;
        const double A1 = a * (a + 1) / 2;
        // first group printed as (w1 X1 V110 - w2 V101): sign and the
        // missing X2 factor kept verbatim (E7)
        acc(m, 1, 1, 0, -a * lam * t3->w1 * means.x);
        acc(m, 1, 0, 1, a * lam * t3->w2);
        const double l2A = lam * lam * A1;
        acc(m, 0, 2, 0, l2A * t3->w1 * t3->w1 * means.x * means.x);
        acc(m, 0, 0, 2, l2A * t3->w2 * t3->w2 * means.z * means.z);
        acc(m, 0, 1, 1, 2 * l2A * t3->w1 * t3->w2 * means.x * means.z);
    } else if (const auto* t4 = std::get_if<ExpRatioSpec>(&spec)) {
        const double b1 = t4->beta1, b2 = t4->beta2;
        acc(m, 1, 1, 0, -b1 / 2);
        acc(m, 1, 0, 1, -b2 / 2);
        acc(m, 0, 2, 0, b1 / 4 + b1 * b1 / 8);
        acc(m, 0, 0, 2, b2 / 4 + b2 * b2 / 8);
    } else {
        const auto& t5 = std::get<DualTransformSpec>(spec);
        const double eta = t5.eta1();
        const double M1 = t5.delta1 * (t5.delta1 - 1) / 2.0 * eta * eta;
        const double N1 = t5.delta2 * (t5.delta2 - 1) / 2.0;
        acc(m, 1, 1, 0, -t5.k1 * eta * t5.delta1);
        acc(m, 1, 0, 1, -t5.k2 * t5.delta2);
        acc(m, 0, 2, 0, t5.k1 * M1);
        acc(m, 0, 0, 2, -t5.k2 * N1);
        // alien alpha1*alpha2*V011 term dropped, as for t2 (E6)
    }
    return means.y * detail::contract(m, v);
}

/// First-order MSE: Ybar^2 times the square of the linearization,
/// contracted against the second-order V entries. The printed per-family
/// quadratic forms coincide with this for all five families.
inline double first_order_mse(const EstimatorSpec& spec, const VTable& v,
                              const Means& means) {
    // lift to degree 2 so the square keeps its quadratic terms
    const TriPoly lin = expand_deviation(spec, means, 1).truncated(2);
    const TriPoly sq = lin * lin;
    return means.y * means.y * sq.expectation(v);
}

/// Second-order MSE, Ybar^2 times the fourth-order bracket.
inline double second_order_mse(const EstimatorSpec& spec, const VTable& v,
                               const Means& means,
                               FormulaMode mode = FormulaMode::Rederived,
                               const PublishedGapConstants& gaps = {}) {
    require_valid(spec);
    const detail::CoeffMap m = mode == FormulaMode::Rederived
                                   ? rederived_second_order_coefficients(spec, means)
                                   : published_second_order_coefficients(spec, means, gaps);
    return means.y * means.y * detail::contract(m, v);
}

/// Minimum of the two-auxiliary linear-regression MSE benchmark:
/// the unconstrained infimum of the t1 first-order quadratic form.
inline double regression_min_mse(const VTable& v, const Means& means) {
    const double V200 = v.at(2, 0, 0), V020 = v.at(0, 2, 0), V002 = v.at(0, 0, 2);
    const double V110 = v.at(1, 1, 0), V101 = v.at(1, 0, 1), V011 = v.at(0, 1, 1);
    const double det = V020 * V002 - V011 * V011;
    if (det <= 0.0)
        throw NumericError("regression_min_mse: singular auxiliary covariance block");
    const double explained =
        (V110 * V110 * V002 + V101 * V101 * V020 - 2 * V110 * V101 * V011) / det;
    return means.y * means.y * (V200 - explained);
}

enum class OptMethod { PublishedFormula, QuadraticSolve };

struct OptimalResult {
    EstimatorSpec spec;
    bool unique = true;
    std::vector<std::string> warnings;
};

/// Fixed structural inputs for the families whose optimization leaves
/// some parameters to the user.
struct OptimExtras {
    double t3_alpha = 1.0;
    int t5_delta1 = 1;
    int t5_delta2 = 1;
    double t5_c = 2.0;
    double t5_d = 1.0;
};

namespace detail {

// Minimize V020 a^2 + V002 b^2 + 2 V011 ab - 2 V110 a - 2 V101 b over (a, b).
// Near-singular positive-semidefinite systems return the minimum-norm
// optimizer with unique = false.
struct Solve2x2 {
    double a = 0.0, b = 0.0;
    bool unique = true;
};

inline Solve2x2 solve_quadratic_2x2(double V020, double V002, double V011,
                                    double V110, double V101) {
    const double scale = std::max(std::abs(V020), std::abs(V002));
    if (scale == 0.0) {
        if (V110 != 0.0 || V101 != 0.0)
            throw NumericError("optimal_parameters: unbounded quadratic (zero curvature)");
        return {0.0, 0.0, false};
    }
    if (V020 < 0.0 || V002 < 0.0 || V020 * V002 - V011 * V011 < -1e-12 * scale * scale)
        throw NumericError("optimal_parameters: quadratic form is not positive semidefinite");
    const double det = V020 * V002 - V011 * V011;
    if (det > 1e-12 * scale * scale) {
        return {(V110 * V002 - V101 * V011) / det, (V101 * V020 - V110 * V011) / det, true};
    }
    // Rank one (rho_xz = +-1): project the gradient onto the nonnull
    // direction, return the minimum-norm point on the optimal line.
    const double trace = V020 + V002;
    if (trace <= 0.0) return {0.0, 0.0, false};
    // dominant eigenvector of [[V020, V011], [V011, V002]]
    double ex, ey;
    if (std::abs(V011) > 1e-300) {
        ex = V011;
        ey = trace - V020;  // = V002 component after deflation
        const double lam = trace;    // rank-1: nonzero eigenvalue = trace
        (void)lam;
    } else if (V020 >= V002) {
        ex = 1.0; ey = 0.0;
    } else {
        ex = 0.0; ey = 1.0;
    }
    const double norm = std::sqrt(ex * ex + ey * ey);
    ex /= norm; ey /= norm;
    const double lam = trace;  // nonzero eigenvalue of the rank-1 matrix
    const double g = V110 * ex + V101 * ey;
    const double resid_x = V110 - g * ex, resid_y = V101 - g * ey;
    if (std::sqrt(resid_x * resid_x + resid_y * resid_y) > 1e-8 * std::sqrt(scale) * std::max(1.0, std::abs(g)))
        throw NumericError("optimal_parameters: singular system (rho_xz^2 = 1) with incompatible gradient");
    const double t = g / lam;
    return {t * ex, t * ey, false};
}

}  // namespace detail

inline OptimalResult optimal_parameters(Family family, const VTable& v,
                                        const Means& means, OptMethod method,
                                        const OptimExtras& extras = {}) {
    const double V200 = v.at(2, 0, 0), V020 = v.at(0, 2, 0), V002 = v.at(0, 0, 2);
    const double V110 = v.at(1, 1, 0), V101 = v.at(1, 0, 1), V011 = v.at(0, 1, 1);
    OptimalResult out{PowerRatioSpec{}};

    switch (family) {
        case Family::T1: {
            if (method == OptMethod::PublishedFormula) {
                if (V200 <= 0.0 || V020 <= 0.0 || V002 <= 0.0)
                    throw NumericError("optimal_parameters: nonpositive variance term");
                const double ryx = V110 / std::sqrt(V200 * V020);
                const double ryz = V101 / std::sqrt(V200 * V002);
                const double rxz = V011 / std::sqrt(V020 * V002);
                const double den = 1.0 - rxz * rxz;
                if (den == 0.0)
                    throw NumericError("optimal_parameters: singular (rho_xz^2 = 1)");
                out.spec = PowerRatioSpec{
                    (ryx - ryz * rxz) / den * std::sqrt(V200 / V020),
                    (ryz - ryx * rxz) / den * std::sqrt(V200 / V002)};
            } else {
                const auto s = detail::solve_quadratic_2x2(V020, V002, V011, V110, V101);
                out.spec = PowerRatioSpec{s.a, s.b};
                out.unique = s.unique;
                if (!s.unique) out.warnings.push_back("flat direction: minimum-norm optimizer returned");
            }
            return out;
        }
        case Family::T2: {
            if (method == OptMethod::PublishedFormula) {
                const double V012 = v.at(0, 1, 2);
                const double den = V020 + V002 - 2 * V012;
                if (den == 0.0) throw NumericError("optimal_parameters: singular t2 denominator");
                const double l1 = (V002 - V101 + V110 - V012) / den;
                out.spec = WeightedRatioSpec{l1, 1.0 - l1};
                out.warnings.push_back(
                    "published t2 optimum uses third-order V012 where V011 is expected (E8)");
            } else {
                const double den = V020 + V002 - 2 * V011;
                if (std::abs(den) <= 1e-14 * std::max(std::abs(V020), std::abs(V002))) {
                    const double num = V002 - V011 - V101 + V110;
                    if (std::abs(num) > 1e-14 * std::max({std::abs(V110), std::abs(V101), 1e-300}))
                        throw NumericError("optimal_parameters: t2 quadratic degenerate and tilted");
                    out.spec = WeightedRatioSpec{0.5, 0.5};
                    out.unique = false;
                    out.warnings.push_back("flat weight direction: equal weights returned");
                } else {
                    if (den < 0.0)
                        throw NumericError("optimal_parameters: t2 quadratic has negative curvature");
                    const double l1 = (V002 - V011 - V101 + V110) / den;
                    out.spec = WeightedRatioSpec{l1, 1.0 - l1};
                }
            }
            return out;
        }
        case Family::T3: {
            const double a = extras.t3_alpha;
            const double X1 = means.x, X2 = means.z;
            if (method == OptMethod::PublishedFormula) {
                // The printed w1* contains lambda = 1/(w1 X1 + w2 X2), so the
                // expression is implicit in w1; resolved by fixed-point iteration.
                double w1 = 0.5;
                bool converged = false;
                for (int it = 0; it < 200; ++it) {
                    const double denom_l = w1 * X1 + (1.0 - w1) * X2;
                    if (denom_l == 0.0)
                        throw NumericError("optimal_parameters: t3 weighted mean is zero");
                    const double lam = 1.0 / denom_l;
                    const double den = X1 * X1 * V020 + a * lam * X2 * X2 * V002 -
                                       2 * X1 * X2 * V011;
                    if (den == 0.0)
                        throw NumericError("optimal_parameters: singular t3 denominator");
                    const double next =
                        (X1 * V110 - X2 * V101 + X2 * X2 * V002 - X1 * X2 * V011) / den;
                    if (std::abs(next - w1) < 1e-12) { w1 = next; converged = true; break; }
                    w1 = next;
                }
                if (!converged)
                    out.warnings.push_back("published t3 fixed-point iteration did not converge");
                out.spec = CombinedRatioSpec{w1, 1.0 - w1, a};
                out.warnings.push_back(
                    "published t3 optimum carries a stray alpha*lambda factor (E9)");
            } else {
                if (a == 0.0)
                    throw NumericError("optimal_parameters: t3 with alpha = 0 is flat in w");
                // Effective linear coefficients (c1, c2) on (e1, e2) satisfy
                // c1 + c2 = alpha; minimize the quadratic over that line.
                const double den = V020 + V002 - 2 * V011;
                if (den <= 0.0)
                    throw NumericError("optimal_parameters: t3 quadratic degenerate");
                const double c1 = (a * V002 - a * V011 + V110 - V101) / den;
                const double s = c1 / a;  // = w1 X1 / (w1 X1 + w2 X2)
                const double wden = X1 * (1.0 - s) + s * X2;
                if (wden == 0.0)
                    throw NumericError("optimal_parameters: t3 weight back-substitution singular");
                const double w1 = s * X2 / wden;
                out.spec = CombinedRatioSpec{w1, 1.0 - w1, a};
            }
            return out;
        }
        case Family::T4: {
            const OptimalResult base =
                optimal_parameters(Family::T1, v, means, method, extras);
            const auto& t1 = std::get<PowerRatioSpec>(base.spec);
            out.spec = ExpRatioSpec{2.0 * t1.alpha1, 2.0 * t1.alpha2};
            out.unique = base.unique;
            out.warnings = base.warnings;
            return out;
        }
        case Family::T5: {
            DualTransformSpec t5;
            t5.delta1 = extras.t5_delta1;
            t5.delta2 = extras.t5_delta2;
            t5.c = extras.t5_c;
            t5.d = extras.t5_d;
            const double u = t5.delta1 * t5.eta1();
            const double w = t5.delta2;
            if (method == OptMethod::PublishedFormula) {
                const double V102 = v.at(1, 0, 2);
                const double den = u * u * V110 + w * w * V002 - 2 * u * w * V011;
                if (den == 0.0) throw NumericError("optimal_parameters: singular t5 denominator");
                const double k1 = (u * V110 + w * w * V002 - w * V102 - u * w * V011) / den;
                t5.k1 = k1;
                t5.k2 = 1.0 - k1;
                out.warnings.push_back(
                    "published t5 optimum uses V102 for V101 and V110 for V020 (E10)");
            } else {
                const double den = u * u * V020 + w * w * V002 - 2 * u * w * V011;
                if (std::abs(den) <= 1e-14 * std::max(std::abs(V020), std::abs(V002))) {
                    t5.k1 = 0.5;
                    t5.k2 = 0.5;
                    out.unique = false;
                    out.warnings.push_back("flat k direction: equal weights returned");
                } else {
                    if (den < 0.0)
                        throw NumericError("optimal_parameters: t5 quadratic has negative curvature");
                    const double k1 = (u * V110 - w * V101 + w * w * V002 - u * w * V011) / den;
                    t5.k1 = k1;
                    t5.k2 = 1.0 - k1;
                }
            }
            out.spec = t5;
            return out;
        }
    }
    throw ConfigError("optimal_parameters: unknown family");
}

/// Golden-section line search for the t3 exponent on [-4, 4], minimizing
/// the first-order MSE at the per-alpha optimal weights.
inline double optimize_t3_alpha(const VTable& v, const Means& means,
                                double lo = -4.0, double hi = 4.0, double tol = 1e-8) {
    auto objective = [&](double a) {
        OptimExtras ex;
        ex.t3_alpha = a;
        try {
            const OptimalResult r =
                optimal_parameters(Family::T3, v, means, OptMethod::QuadraticSolve, ex);
            return first_order_mse(r.spec, v, means);
        } catch (const NumericError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = objective(c), fd = objective(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - phi * (b - a);
            fc = objective(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + phi * (b - a);
            fd = objective(d);
        }
    }
    return (a + b) / 2.0;
}

}  // namespace srslab
