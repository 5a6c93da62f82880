#pragma once

// Shared test helpers: seeded random populations with positive values and
// mild correlation, so ratio-type estimators are well behaved on every
// SRSWOR sample.

#include <random>
#include <vector>

#include "srslab/population.hpp"

namespace testutil {

inline srslab::Population random_population(std::mt19937_64& rng, int N,
                                            double base_lo = 50.0,
                                            double base_hi = 100.0,
                                            double noise = 4.0) {
    std::uniform_real_distribution<double> base(base_lo, base_hi);
    std::uniform_real_distribution<double> eps(-noise, noise);
    std::vector<double> y, x, z;
    y.reserve(static_cast<std::size_t>(N));
    x.reserve(static_cast<std::size_t>(N));
    z.reserve(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        const double b = base(rng);
        y.push_back(b + eps(rng));
        x.push_back(b + eps(rng));
        z.push_back(0.8 * b + 20.0 + eps(rng));
    }
    return srslab::Population(std::move(y), std::move(x), std::move(z));
}

}  // namespace testutil
