#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "srslab/error.hpp"

namespace srslab {

/// Saturating binomial coefficient C(N, n). Returns
/// std::numeric_limits<std::uint64_t>::max() on overflow.
inline std::uint64_t binomial_count(int N, int n) {
    if (n < 0 || N < 0 || n > N) return 0;
    if (n > N - n) n = N - n;
    constexpr std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t result = 1;
    for (int k = 1; k <= n; ++k) {
        const std::uint64_t mult = static_cast<std::uint64_t>(N - n + k);
        if (result > cap / mult) return cap;
        result = result * mult / static_cast<std::uint64_t>(k);
    }
    return result;
}

/// Visits every n-subset of {0,...,N-1} exactly once, in lexicographic
/// order. The callback receives the current index set as a span.
template <class F>
void for_each_combination(int N, int n, F&& visit) {
    if (n < 1 || n > N) throw NumericError("for_each_combination: need 1 <= n <= N");
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
        visit(std::span<const int>(idx));
        int i = n - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == N - n + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

}  // namespace srslab
