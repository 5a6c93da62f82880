#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "srslab/error.hpp"
#include "srslab/population.hpp"

namespace srslab {

enum class Family { T1, T2, T3, T4, T5 };

inline const char* to_string(Family f) {
    switch (f) {
        case Family::T1: return "t1";
        case Family::T2: return "t2";
        case Family::T3: return "t3";
        case Family::T4: return "t4";
        case Family::T5: return "t5";
    }
    return "?";
}

/// t1 = ybar (Xbar/xbar)^alpha1 (Zbar/zbar)^alpha2
struct PowerRatioSpec {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
};

/// t2 = ybar [lambda1 Xbar/xbar + lambda2 Zbar/zbar], lambda1 + lambda2 = 1
struct WeightedRatioSpec {
    double lambda1 = 0.5;
    double lambda2 = 0.5;
};

/// t3 = ybar [(w1 Xbar + w2 Zbar) / (w1 xbar + w2 zbar)]^alpha, w1 + w2 = 1.
/// The two auxiliaries of this family map to (x, z).
struct CombinedRatioSpec {
    double w1 = 0.5;
    double w2 = 0.5;
    double alpha = 1.0;
};

/// t4 = ybar exp(beta1 (Xbar-xbar)/(Xbar+xbar)) exp(beta2 (Zbar-zbar)/(Zbar+zbar))
struct ExpRatioSpec {
    double beta1 = 0.0;
    double beta2 = 0.0;
};

/// t5 = ybar [k1 {(c Xbar - d xbar)/((c-d) Xbar)}^delta1 + k2 {2 - (zbar/Zbar)^delta2}]
/// with k1 + k2 = 1, delta's in {-1, 0, 1}, and eta1 = d/(c-d).
struct DualTransformSpec {
    double k1 = 0.5;
    double k2 = 0.5;
    int delta1 = 1;
    int delta2 = 1;
    double c = 2.0;
    double d = 1.0;

    [[nodiscard]] double eta1() const {
        if (c == d) throw NumericError("t5: c == d, eta1 undefined");
        return d / (c - d);
    }
};

using EstimatorSpec =
    std::variant<PowerRatioSpec, WeightedRatioSpec, CombinedRatioSpec, ExpRatioSpec,
                 DualTransformSpec>;

inline Family family_of(const EstimatorSpec& spec) {
    return static_cast<Family>(spec.index());
}

/// Returns every violated invariant; an empty list means the spec is valid.
inline std::vector<std::string> validate_spec(const EstimatorSpec& spec) {
    std::vector<std::string> out;
    auto check_weight_sum = [&](double a, double b, const char* names) {
        if (std::abs(a + b - 1.0) > 1e-12)
            out.push_back(std::string("weights ") + names + " sum " +
                          std::to_string(a + b) + " != 1");
    };
    if (const auto* t2 = std::get_if<WeightedRatioSpec>(&spec)) {
        check_weight_sum(t2->lambda1, t2->lambda2, "lambda1+lambda2");
    } else if (const auto* t3 = std::get_if<CombinedRatioSpec>(&spec)) {
        check_weight_sum(t3->w1, t3->w2, "w1+w2");
    } else if (const auto* t5 = std::get_if<DualTransformSpec>(&spec)) {
        check_weight_sum(t5->k1, t5->k2, "k1+k2");
        if (t5->c == t5->d) out.push_back("c = d");
        if (t5->delta1 < -1 || t5->delta1 > 1)
            out.push_back("delta1 outside {-1, 0, 1}");
        if (t5->delta2 < -1 || t5->delta2 > 1)
            out.push_back("delta2 outside {-1, 0, 1}");
    }
    return out;
}

inline void require_valid(const EstimatorSpec& spec) {
    const auto violations = validate_spec(spec);
    if (!violations.empty()) {
        std::string msg = "invalid estimator spec:";
        for (const auto& v : violations) msg += " [" + v + "]";
        throw NumericError(msg);
    }
}

namespace detail {

inline bool is_integer(double a) { return a == std::floor(a); }

// base^expo with the domain rule: non-integer exponents require base > 0.
inline double checked_pow(double base, double expo, const char* what) {
    if (expo == 0.0) return 1.0;
    if (base == 0.0 && expo < 0.0)
        throw NumericError(std::string(what) + ": division by zero");
    if (base < 0.0 && !is_integer(expo))
        throw NumericError(std::string(what) +
                           ": negative base with non-integer exponent");
    if (base == 0.0 && expo > 0.0) return 0.0;
    return std::pow(base, expo);
}

inline double ipow(double base, int e) {
    double r = 1.0;
    const bool neg = e < 0;
    for (int i = 0; i < (neg ? -e : e); ++i) r *= base;
    if (neg) {
        if (r == 0.0) throw NumericError("t5: division by zero in power");
        return 1.0 / r;
    }
    return r;
}

}  // namespace detail

/// Literal point evaluation of the estimator on a concrete sample.
/// No series approximation is involved.
inline double evaluate(const EstimatorSpec& spec, const SampleView& sample,
                       const Population& pop) {
    require_valid(spec);
    const Means& M = pop.means();
    const double yb = sample.ybar(), xb = sample.xbar(), zb = sample.zbar();

    if (const auto* t1 = std::get_if<PowerRatioSpec>(&spec)) {
        if (xb == 0.0 || zb == 0.0)
            throw NumericError("t1: zero sample mean in ratio");
        return yb * detail::checked_pow(M.x / xb, t1->alpha1, "t1") *
               detail::checked_pow(M.z / zb, t1->alpha2, "t1");
    }
    if (const auto* t2 = std::get_if<WeightedRatioSpec>(&spec)) {
        if (xb == 0.0 || zb == 0.0)
            throw NumericError("t2: zero sample mean in ratio");
        return yb * (t2->lambda1 * M.x / xb + t2->lambda2 * M.z / zb);
    }
    if (const auto* t3 = std::get_if<CombinedRatioSpec>(&spec)) {
        const double denom = t3->w1 * xb + t3->w2 * zb;
        if (denom == 0.0) throw NumericError("t3: zero weighted sample mean");
        return yb *
               detail::checked_pow((t3->w1 * M.x + t3->w2 * M.z) / denom, t3->alpha, "t3");
    }
    if (const auto* t4 = std::get_if<ExpRatioSpec>(&spec)) {
        const double dx = M.x + xb, dz = M.z + zb;
        if (dx == 0.0 || dz == 0.0)
            throw NumericError("t4: zero denominator in exponent argument");
        return yb * std::exp(t4->beta1 * (M.x - xb) / dx) *
               std::exp(t4->beta2 * (M.z - zb) / dz);
    }
    const auto& t5 = std::get<DualTransformSpec>(spec);
    if ((t5.c - t5.d) * M.x == 0.0)
        throw NumericError("t5: (c - d) * Xbar is zero");
    if (zb == 0.0 && t5.delta2 < 0) throw NumericError("t5: zero sample mean zbar");
    const double ratio_x = (t5.c * M.x - t5.d * xb) / ((t5.c - t5.d) * M.x);
    if (ratio_x == 0.0 && t5.delta1 < 0)
        throw NumericError("t5: division by zero in x-transform");
    const double zr = M.z == 0.0 ? throw NumericError("t5: zero mean Zbar")
                                 : zb / M.z;
    return yb * (t5.k1 * detail::ipow(ratio_x, t5.delta1) +
                 t5.k2 * (2.0 - detail::ipow(zr, t5.delta2)));
}

}  // namespace srslab
