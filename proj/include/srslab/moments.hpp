#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "srslab/combinatorics.hpp"
#include "srslab/error.hpp"
#include "srslab/population.hpp"

namespace srslab {

/// Exponent triple (p, q, r) indexing moments and expectation terms.
/// Convention throughout: p is the power on the y-deviation, q on x, r on z.
struct Index3 {
    int p = 0, q = 0, r = 0;
    [[nodiscard]] int total() const { return p + q + r; }
    auto operator<=>(const Index3&) const = default;
};

inline std::string to_string(const Index3& i) {
    return std::to_string(i.p) + std::to_string(i.q) + std::to_string(i.r);
}

/// Central cross-moment C_pqr = sum_i (y_i - Ybar)^p (x_i - Xbar)^q (z_i - Zbar)^r.
/// Two-pass: means first, then deviation products.
inline double central_moment(const Population& pop, int p, int q, int r) {
    if (p < 0 || q < 0 || r < 0) throw NumericError("central_moment: negative exponent");
    const Means& m = pop.means();
    double sum = 0.0;
    const int N = pop.size();
    for (int i = 0; i < N; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        double term = 1.0;
        const double dy = pop.y()[k] - m.y;
        const double dx = pop.x()[k] - m.x;
        const double dz = pop.z()[k] - m.z;
        for (int j = 0; j < p; ++j) term *= dy;
        for (int j = 0; j < q; ++j) term *= dx;
        for (int j = 0; j < r; ++j) term *= dz;
        sum += term;
    }
    return sum;
}

/// Table of raw-sum central cross-moments for all p+q+r <= max_order.
struct MomentTable {
    int N = 0;
    std::map<Index3, double> c;

    [[nodiscard]] double at(int p, int q, int r) const {
        auto it = c.find(Index3{p, q, r});
        if (it == c.end())
            throw NumericError("MomentTable: missing entry C" + to_string(Index3{p, q, r}));
        return it->second;
    }
};

inline MomentTable compute_moments(const Population& pop, int max_order = 4) {
    MomentTable t;
    t.N = pop.size();
    for (int p = 0; p <= max_order; ++p)
        for (int q = 0; p + q <= max_order; ++q)
            for (int r = 0; p + q + r <= max_order; ++r)
                t.c[Index3{p, q, r}] = central_moment(pop, p, q, r);
    return t;
}

/// Exact integer ratio, kept reduced. Backs the L coefficients so the
/// identity L1 * n * (N-1) == N - n holds without rounding.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0) throw NumericError("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }
    [[nodiscard]] double value() const {
        return static_cast<double>(num) / static_cast<double>(den);
    }
};

/// Finite-population coefficients converting central moments into
/// expectations of sample-mean deviation products under SRSWOR.
/// L3 and L4 need N >= 4, L2 needs N >= 3.
class LCoefficients {
public:
    LCoefficients(int N, int n) : N_(N), n_(n) {
        if (n < 1 || n > N) throw NumericError("l_coefficients: need 1 <= n <= N");
        const std::int64_t Nl = N, nl = n;
        l1_ = Rational(Nl - nl, (Nl - 1) * nl);
        if (N >= 3)
            l2_ = Rational((Nl - nl) * (Nl - 2 * nl), (Nl - 1) * (Nl - 2) * nl * nl);
        if (N >= 4) {
            const std::int64_t d = (Nl - 1) * (Nl - 2) * (Nl - 3) * nl * nl * nl;
            l3_ = Rational((Nl - nl) * (Nl * Nl + Nl - 6 * nl * Nl + 6 * nl * nl), d);
            l4_ = Rational(Nl * (Nl - nl) * (Nl - nl - 1) * (nl - 1), d);
        }
    }

    [[nodiscard]] int N() const { return N_; }
    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] Rational l1() const { return l1_; }
    [[nodiscard]] Rational l2() const { return require(l2_, "L2 requires N >= 3"); }
    [[nodiscard]] Rational l3() const { return require(l3_, "L3 requires N >= 4"); }
    [[nodiscard]] Rational l4() const { return require(l4_, "L4 requires N >= 4"); }

private:
    static Rational require(const std::optional<Rational>& r, const char* msg) {
        if (!r) throw NumericError(msg);
        return *r;
    }
    int N_, n_;
    Rational l1_;
    std::optional<Rational> l2_, l3_, l4_;
};

inline LCoefficients l_coefficients(int N, int n) { return LCoefficients(N, n); }

/// How a V table entry was obtained.
enum class Provenance { ClosedForm, Enumerated, MonteCarlo, LiteralFixture };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::ClosedForm: return "closed-form";
        case Provenance::Enumerated: return "enumerated";
        case Provenance::MonteCarlo: return "monte-carlo";
        case Provenance::LiteralFixture: return "literal-fixture";
    }
    return "?";
}

struct VEntry {
    double value = 0.0;
    Provenance provenance = Provenance::ClosedForm;
    double std_error = 0.0;  // Monte Carlo only
};

/// Normalized SRSWOR expectation terms V_pqr = E[e0^p e1^q e2^r].
struct VTable {
    int N = 0;
    int n = 0;
    std::map<Index3, VEntry> entries;

    [[nodiscard]] bool has(int p, int q, int r) const {
        return entries.contains(Index3{p, q, r});
    }
    [[nodiscard]] double at(int p, int q, int r) const {
        auto it = entries.find(Index3{p, q, r});
        if (it == entries.end())
            throw NumericError("VTable: missing entry V" + to_string(Index3{p, q, r}));
        return it->second.value;
    }
    void set(int p, int q, int r, double value, Provenance prov, double se = 0.0) {
        entries[Index3{p, q, r}] = VEntry{value, prov, se};
    }
};

/// True when (p, q, r) is one of the sixteen identities with a printed
/// closed form in terms of C moments and L coefficients.
inline bool has_closed_form(const Index3& i) {
    static const Index3 listed[] = {
        {2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 1, 0}, {0, 1, 1}, {1, 0, 1},
        {2, 1, 0}, {2, 0, 1}, {0, 2, 1}, {1, 2, 0}, {0, 1, 2}, {1, 0, 2},
        {0, 3, 0}, {0, 3, 1}, {0, 1, 3}, {1, 3, 0},
    };
    for (const auto& j : listed)
        if (i == j) return true;
    return false;
}

/// Closed-form V_pqr from the moment identities. The identities hold for
/// mean-based central moments, so the raw sums in the table are divided
/// by N before the L coefficients are applied (see docs/errata.md, E2).
inline double v_closed_form(const MomentTable& moments, const LCoefficients& L,
                            const Means& means, const Index3& idx) {
    if (!has_closed_form(idx))
        throw NumericError("v_closed_form: no listed identity for V" + to_string(idx));
    require_nonzero_means(means);
    const double invN = 1.0 / static_cast<double>(moments.N);
    auto mu = [&](int p, int q, int r) { return moments.at(p, q, r) * invN; };

    double numerator = 0.0;
    if (idx.total() <= 2) {
        numerator = L.l1().value() * mu(idx.p, idx.q, idx.r);
    } else if (idx.total() == 3) {
        numerator = L.l2().value() * mu(idx.p, idx.q, idx.r);
    } else {
        const double l3 = L.l3().value();
        const double l4 = L.l4().value();
        if (idx == Index3{0, 3, 1})
            numerator = l3 * mu(0, 3, 1) + 3.0 * l4 * mu(0, 2, 0) * mu(0, 1, 1);
        else if (idx == Index3{0, 1, 3})
            numerator = l3 * mu(0, 1, 3) + 3.0 * l4 * mu(0, 0, 2) * mu(0, 1, 1);
        else  // {1, 3, 0}
            numerator = l3 * mu(1, 3, 0) + 3.0 * l4 * mu(0, 2, 0) * mu(1, 1, 0);
    }
    double denom = 1.0;
    for (int j = 0; j < idx.p; ++j) denom *= means.y;
    for (int j = 0; j < idx.q; ++j) denom *= means.x;
    for (int j = 0; j < idx.r; ++j) denom *= means.z;
    return numerator / denom;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

struct VExactOptions {
    std::uint64_t enumeration_budget = 2'000'000;
    std::uint64_t mc_replications = 200'000;
    std::uint64_t seed = 1;
};

struct VExactResult {
    double value = 0.0;
    Provenance provenance = Provenance::Enumerated;
    double std_error = 0.0;
};

/// Exact (or Monte Carlo) E[e0^p e1^q e2^r] over the SRSWOR design:
/// full enumeration of all C(N, n) samples when that count fits the
/// budget, otherwise seeded Monte Carlo with a reported standard error.
VExactResult v_exact(const Population& pop, int n, const Index3& idx,
                     const VExactOptions& opt = {});

enum class VPolicy { ClosedFormWhereListed, EnumerateAll };

/// Builds the full V table for all p+q+r <= 4. Under
/// ClosedFormWhereListed the sixteen listed identities use their closed
/// forms and the remaining indices fall back to the exact oracle.
VTable build_v_table(const Population& pop, int n,
                     VPolicy policy = VPolicy::ClosedFormWhereListed,
                     const VExactOptions& opt = {});

// --- implementation ---

namespace detail {

/// One pass over samples, accumulating all monomials e0^p e1^q e2^r with
/// p+q+r <= 4. Used by both the enumeration and Monte Carlo paths.
struct MonomialAccumulator {
    // powers[a][b][c] = running sum for exponents (a, b, c)
    double sums[5][5][5] = {};
    std::uint64_t count = 0;

    void add(double e0, double e1, double e2) {
        double p0[5], p1[5], p2[5];
        p0[0] = p1[0] = p2[0] = 1.0;
        for (int j = 1; j <= 4; ++j) {
            p0[j] = p0[j - 1] * e0;
            p1[j] = p1[j - 1] * e1;
            p2[j] = p2[j - 1] * e2;
        }
        for (int a = 0; a <= 4; ++a)
            for (int b = 0; a + b <= 4; ++b)
                for (int c = 0; a + b + c <= 4; ++c)
                    sums[a][b][c] += p0[a] * p1[b] * p2[c];
        ++count;
    }
};

inline void accumulate_enumeration(const Population& pop, int n, MonomialAccumulator& acc) {
    const Means& m = pop.means();
    require_nonzero_means(m);
    for_each_combination(pop.size(), n, [&](std::span<const int> idx) {
        double sy = 0.0, sx = 0.0, sz = 0.0;
        for (int i : idx) {
            const std::size_t k = static_cast<std::size_t>(i);
            sy += pop.y()[k];
            sx += pop.x()[k];
            sz += pop.z()[k];
        }
        const double inv = 1.0 / static_cast<double>(n);
        acc.add((sy * inv - m.y) / m.y, (sx * inv - m.x) / m.x, (sz * inv - m.z) / m.z);
    });
}

}  // namespace detail

inline VExactResult v_exact(const Population& pop, int n, const Index3& idx,
                            const VExactOptions& opt) {
    if (n < 1 || n > pop.size()) throw NumericError("v_exact: need 1 <= n <= N");
    if (idx.total() > 4) throw NumericError("v_exact: order above 4 unsupported");
    const Means& m = pop.means();
    require_nonzero_means(m);

    const std::uint64_t total = binomial_count(pop.size(), n);
    if (total <= opt.enumeration_budget) {
        if (idx.total() == 1)  // E(e_i) = 0 identically; do not let rounding decide
            return VExactResult{0.0, Provenance::Enumerated, 0.0};
        detail::MonomialAccumulator acc;
        detail::accumulate_enumeration(pop, n, acc);
        return VExactResult{acc.sums[idx.p][idx.q][idx.r] / static_cast<double>(acc.count),
                            Provenance::Enumerated, 0.0};
    }

    // Monte Carlo fallback with replicate-level standard error.
    std::mt19937_64 rng(detail::splitmix64(opt.seed));
    const int N = pop.size();
    std::vector<int> perm(static_cast<std::size_t>(N));
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t rep = 0; rep < opt.mc_replications; ++rep) {
        for (int i = 0; i < N; ++i) perm[static_cast<std::size_t>(i)] = i;
        double sy = 0.0, sx = 0.0, sz = 0.0;
        for (int i = 0; i < n; ++i) {
            std::uniform_int_distribution<int> pick(i, N - 1);
            std::swap(perm[static_cast<std::size_t>(i)],
                      perm[static_cast<std::size_t>(pick(rng))]);
            const std::size_t k = static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]);
            sy += pop.y()[k];
            sx += pop.x()[k];
            sz += pop.z()[k];
        }
        const double inv = 1.0 / static_cast<double>(n);
        const double e0 = (sy * inv - m.y) / m.y;
        const double e1 = (sx * inv - m.x) / m.x;
        const double e2 = (sz * inv - m.z) / m.z;
        double v = 1.0;
        for (int j = 0; j < idx.p; ++j) v *= e0;
        for (int j = 0; j < idx.q; ++j) v *= e1;
        for (int j = 0; j < idx.r; ++j) v *= e2;
        sum += v;
        sumsq += v * v;
    }
    const double reps = static_cast<double>(opt.mc_replications);
    const double mean = sum / reps;
    const double var = reps > 1 ? (sumsq - reps * mean * mean) / (reps - 1.0) : 0.0;
    return VExactResult{mean, Provenance::MonteCarlo, std::sqrt(std::max(var, 0.0) / reps)};
}

inline VTable build_v_table(const Population& pop, int n, VPolicy policy,
                            const VExactOptions& opt) {
    if (n < 1 || n > pop.size()) throw NumericError("build_v_table: need 1 <= n <= N");
    VTable t;
    t.N = pop.size();
    t.n = n;

    const bool enumerable = binomial_count(pop.size(), n) <= opt.enumeration_budget;
    std::optional<detail::MonomialAccumulator> acc;
    if (enumerable) {
        acc.emplace();
        detail::accumulate_enumeration(pop, n, *acc);
    }

    std::optional<MomentTable> moments;
    std::optional<LCoefficients> L;
    if (policy == VPolicy::ClosedFormWhereListed) {
        moments = compute_moments(pop);
        L.emplace(pop.size(), n);
    }

    for (int p = 0; p <= 4; ++p)
        for (int q = 0; p + q <= 4; ++q)
            for (int r = 0; p + q + r <= 4; ++r) {
                const Index3 idx{p, q, r};
                if (idx.total() == 0) continue;
                if (idx.total() == 1) {
                    t.set(p, q, r, 0.0,
                          acc ? Provenance::Enumerated : Provenance::MonteCarlo);
                } else if (policy == VPolicy::ClosedFormWhereListed && has_closed_form(idx)) {
                    t.set(p, q, r, v_closed_form(*moments, *L, pop.means(), idx),
                          Provenance::ClosedForm);
                } else if (acc) {
                    t.set(p, q, r, acc->sums[p][q][r] / static_cast<double>(acc->count),
                          Provenance::Enumerated);
                } else {
                    const VExactResult res = v_exact(pop, n, idx, opt);
                    t.set(p, q, r, res.value, res.provenance, res.std_error);
                }
            }
    return t;
}

}  // namespace srslab
