#pragma once

#include <map>

#include "srslab/error.hpp"
#include "srslab/moments.hpp"

namespace srslab {

/// Sparse polynomial in the relative errors (e0, e1, e2), truncated at a
/// fixed total degree. Only ~35 monomials exist at degree <= 4, so a map
/// keyed by exponent triple is exact and cheap.
class TriPoly {
public:
    explicit TriPoly(int max_degree = 4) : max_degree_(max_degree) {
        if (max_degree < 0) throw ConfigError("TriPoly: negative degree");
    }

    static TriPoly constant(double c, int max_degree = 4) {
        TriPoly p(max_degree);
        p.add_term({0, 0, 0}, c);
        return p;
    }

    static TriPoly variable(int which, int max_degree = 4) {
        TriPoly p(max_degree);
        Index3 idx;
        if (which == 0) idx = {1, 0, 0};
        else if (which == 1) idx = {0, 1, 0};
        else idx = {0, 0, 1};
        p.add_term(idx, 1.0);
        return p;
    }

    [[nodiscard]] int max_degree() const { return max_degree_; }
    [[nodiscard]] const std::map<Index3, double>& terms() const { return terms_; }

    [[nodiscard]] double coeff(int p, int q, int r) const {
        auto it = terms_.find(Index3{p, q, r});
        return it == terms_.end() ? 0.0 : it->second;
    }

    void add_term(const Index3& idx, double c) {
        if (idx.total() > max_degree_ || c == 0.0) return;
        auto [it, inserted] = terms_.emplace(idx, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    TriPoly& operator+=(const TriPoly& o) {
        for (const auto& [idx, c] : o.terms_) add_term(idx, c);
        return *this;
    }
    TriPoly& operator-=(const TriPoly& o) {
        for (const auto& [idx, c] : o.terms_) add_term(idx, -c);
        return *this;
    }
    TriPoly& operator*=(double s) {
        if (s == 0.0) { terms_.clear(); return *this; }
        for (auto& [idx, c] : terms_) c *= s;
        return *this;
    }

    friend TriPoly operator+(TriPoly a, const TriPoly& b) { a += b; return a; }
    friend TriPoly operator-(TriPoly a, const TriPoly& b) { a -= b; return a; }
    friend TriPoly operator*(TriPoly a, double s) { a *= s; return a; }
    friend TriPoly operator*(double s, TriPoly a) { a *= s; return a; }

    friend TriPoly operator*(const TriPoly& a, const TriPoly& b) {
        TriPoly out(a.max_degree_);
        for (const auto& [ia, ca] : a.terms_)
            for (const auto& [ib, cb] : b.terms_) {
                const Index3 idx{ia.p + ib.p, ia.q + ib.q, ia.r + ib.r};
                if (idx.total() <= out.max_degree_) out.add_term(idx, ca * cb);
            }
        return out;
    }

    [[nodiscard]] TriPoly truncated(int degree) const {
        TriPoly out(degree);
        for (const auto& [idx, c] : terms_)
            if (idx.total() <= degree) out.add_term(idx, c);
        return out;
    }

    /// Contraction against a V table: sum of coeff_pqr * V_pqr, the
    /// expectation of the polynomial under the sampling design.
    [[nodiscard]] double expectation(const VTable& v) const {
        double sum = 0.0;
        for (const auto& [idx, c] : terms_) {
            if (idx.total() == 0) { sum += c; continue; }
            sum += c * v.at(idx.p, idx.q, idx.r);
        }
        return sum;
    }

private:
    int max_degree_;
    std::map<Index3, double> terms_;
};

/// (1 + u)^a truncated, where u must have zero constant term.
/// Uses the generalized binomial series, exact for the coefficients kept.
inline TriPoly pow_one_plus(const TriPoly& u, double a) {
    if (u.coeff(0, 0, 0) != 0.0)
        throw NumericError("pow_one_plus: argument must have zero constant term");
    const int order = u.max_degree();
    TriPoly result = TriPoly::constant(1.0, order);
    TriPoly upow = TriPoly::constant(1.0, order);
    double binom = 1.0;
    for (int j = 1; j <= order; ++j) {
        binom *= (a - static_cast<double>(j - 1)) / static_cast<double>(j);
        upow = upow * u;
        result += binom * upow;
    }
    return result;
}

/// exp(u) truncated, u with zero constant term.
inline TriPoly exp_series(const TriPoly& u) {
    if (u.coeff(0, 0, 0) != 0.0)
        throw NumericError("exp_series: argument must have zero constant term");
    const int order = u.max_degree();
    TriPoly result = TriPoly::constant(1.0, order);
    TriPoly upow = TriPoly::constant(1.0, order);
    double factorial = 1.0;
    for (int j = 1; j <= order; ++j) {
        factorial *= static_cast<double>(j);
        upow = upow * u;
        result += (1.0 / factorial) * upow;
    }
    return result;
}

}  // namespace srslab
