#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "srslab/combinatorics.hpp"
#include "srslab/estimators.hpp"
#include "srslab/moments.hpp"
#include "srslab/population.hpp"

namespace srslab {

enum class SimMethod { Enumeration, MonteCarlo };

inline const char* to_string(SimMethod m) {
    return m == SimMethod::Enumeration ? "enumeration" : "monte-carlo";
}

/// Design-exact (or empirical) bias and MSE of an estimator under SRSWOR.
/// Enumeration results carry no standard errors; Monte Carlo results
/// record the rng identifier, seed, and replicate standard errors.
struct SimResult {
    Family family = Family::T1;
    int n = 0;
    SimMethod method = SimMethod::Enumeration;
    std::uint64_t replications = 0;  // Monte Carlo only
    double bias = 0.0;
    double mse = 0.0;
    double bias_std_error = 0.0;  // Monte Carlo only
    double mse_std_error = 0.0;   // Monte Carlo only
    std::uint64_t seed = 0;       // Monte Carlo only
    std::uint64_t failures = 0;   // Monte Carlo: replicates excluded after errors
    std::string rng = "";         // Monte Carlo only
};

/// Draws n distinct indices uniformly over all C(N, n) subsets using a
/// partial Fisher-Yates shuffle. Deterministic given the rng state.
inline std::vector<int> srswor_sample(std::mt19937_64& rng, int N, int n) {
    if (n < 1 || n > N) throw NumericError("srswor_sample: need 1 <= n <= N");
    std::vector<int> perm(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<int> pick(i, N - 1);
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(pick(rng))]);
    }
    perm.resize(static_cast<std::size_t>(n));
    return perm;
}

/// Visits every SRSWOR sample exactly once, averaging (t - Ybar) and
/// (t - Ybar)^2 over the whole design. Any estimator evaluation failure
/// is a hard error reporting the offending subset.
inline SimResult enumerate_exact(const Population& pop, const EstimatorSpec& spec,
                                 int n, std::uint64_t budget = 2'000'000) {
    if (n < 1 || n > pop.size()) throw NumericError("enumerate_exact: need 1 <= n <= N");
    const std::uint64_t total = binomial_count(pop.size(), n);
    if (total > budget)
        throw NumericError("enumerate_exact: C(N,n) = " + std::to_string(total) +
                           " exceeds budget " + std::to_string(budget));
    require_valid(spec);
    const double ybar_pop = pop.means().y;
    double sum_dev = 0.0, sum_sq = 0.0;
    std::uint64_t count = 0;
    for_each_combination(pop.size(), n, [&](std::span<const int> idx) {
        double t;
        try {
            t = evaluate(spec, SampleView(pop, idx), pop);
        } catch (const NumericError& e) {
            std::string subset;
            for (int i : idx) subset += (subset.empty() ? "" : ",") + std::to_string(i);
            throw NumericError(std::string("enumerate_exact: evaluation failed on subset {") +
                               subset + "}: " + e.what());
        }
        const double dev = t - ybar_pop;
        sum_dev += dev;
        sum_sq += dev * dev;
        ++count;
    });
    SimResult r;
    r.family = family_of(spec);
    r.n = n;
    r.method = SimMethod::Enumeration;
    r.bias = sum_dev / static_cast<double>(count);
    r.mse = sum_sq / static_cast<double>(count);
    return r;
}

namespace detail {

struct ShardSums {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    std::uint64_t ok = 0, failed = 0;
};

inline ShardSums run_mc_shard(const Population& pop, const EstimatorSpec& spec, int n,
                              std::uint64_t reps, std::uint64_t seed, std::uint64_t shard) {
    std::mt19937_64 rng(splitmix64(seed + 0x100000001ULL * shard));
    const double ybar_pop = pop.means().y;
    ShardSums s;
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        const std::vector<int> idx = srswor_sample(rng, pop.size(), n);
        try {
            const double t = evaluate(spec, SampleView(pop, idx), pop);
            const double dev = t - ybar_pop;
            const double dev2 = dev * dev;
            s.s1 += dev;
            s.s2 += dev2;
            s.s3 += dev2 * dev;
            s.s4 += dev2 * dev2;
            ++s.ok;
        } catch (const NumericError&) {
            ++s.failed;
        }
    }
    return s;
}

}  // namespace detail

/// Empirical bias and MSE over seeded SRSWOR replications. Replications
/// are split across a fixed number of shards whose substreams derive from
/// (seed, shard index), so the result is bit-identical for any worker
/// count. Evaluation failures are excluded from the averages and counted.
inline SimResult monte_carlo(const Population& pop, const EstimatorSpec& spec, int n,
                             std::uint64_t reps, std::uint64_t seed, int workers = 1) {
    if (reps < 1) throw NumericError("monte_carlo: reps must be >= 1");
    if (n < 1 || n > pop.size()) throw NumericError("monte_carlo: need 1 <= n <= N");
    if (workers < 1) throw ConfigError("monte_carlo: workers must be >= 1");
    require_valid(spec);

    constexpr std::uint64_t kShards = 64;
    const std::uint64_t shards = reps < kShards ? reps : kShards;
    std::vector<detail::ShardSums> results(shards);
    std::vector<std::uint64_t> shard_reps(shards, reps / shards);
    for (std::uint64_t s = 0; s < reps % shards; ++s) ++shard_reps[s];

    if (workers == 1) {
        for (std::uint64_t s = 0; s < shards; ++s)
            results[s] = detail::run_mc_shard(pop, spec, n, shard_reps[s], seed, s);
    } else {
        std::vector<std::thread> pool;
        // static striping; merge order is by shard index regardless
        const int W = workers;
        pool.reserve(static_cast<std::size_t>(W));
        for (int w = 0; w < W; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint64_t s = static_cast<std::uint64_t>(w); s < shards;
                     s += static_cast<std::uint64_t>(W))
                    results[s] = detail::run_mc_shard(pop, spec, n, shard_reps[s], seed, s);
            });
        }
        for (auto& t : pool) t.join();
    }

    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    std::uint64_t ok = 0, failed = 0;
    for (const auto& r : results) {  // fixed merge order
        s1 += r.s1; s2 += r.s2; s3 += r.s3; s4 += r.s4;
        ok += r.ok; failed += r.failed;
    }
    if (ok == 0) throw NumericError("monte_carlo: every replicate failed to evaluate");

    const double m = static_cast<double>(ok);
    const double bias = s1 / m;
    const double mse = s2 / m;
    const double var_dev = ok > 1 ? (s2 - m * bias * bias) / (m - 1.0) : 0.0;
    // variance of the replicate statistic (t - Ybar)^2
    const double var_sq = ok > 1 ? (s4 - m * mse * mse) / (m - 1.0) : 0.0;
    (void)s3;

    SimResult r;
    r.family = family_of(spec);
    r.n = n;
    r.method = SimMethod::MonteCarlo;
    r.replications = reps;
    r.bias = bias;
    r.mse = mse;
    r.bias_std_error = std::sqrt(std::max(var_dev, 0.0) / m);
    r.mse_std_error = std::sqrt(std::max(var_sq, 0.0) / m);
    r.seed = seed;
    r.failures = failed;
    r.rng = "mt19937_64/splitmix64-sharded";
    return r;
}

}  // namespace srslab
