#include "zipscan/rng.hpp"

#include <algorithm>
#include <numeric>

#include "zipscan/errors.hpp"

namespace zipscan::rng {

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t index) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    h = splitmix64(h ^ index);
    return std::mt19937_64(h);
}

std::vector<long long> multinomial(std::mt19937_64& eng, long long total,
                                   std::span<const double> weights) {
    const std::size_t k = weights.size();
    std::vector<long long> counts(k, 0);
    if (total <= 0) return counts;

    // Suffix sums keep the conditional probabilities exact at the tail.
    std::vector<double> suffix(k + 1, 0.0);
    for (std::size_t i = k; i-- > 0;) {
        suffix[i] = suffix[i + 1] + std::max(weights[i], 0.0);
    }
    if (suffix[0] <= 0.0) {
        throw DegenerateDataError("multinomial: no positive weight to receive counts");
    }

    long long remaining = total;
    for (std::size_t i = 0; i < k && remaining > 0; ++i) {
        const double w = std::max(weights[i], 0.0);
        if (w <= 0.0) continue;
        if (suffix[i + 1] <= 0.0) {
            counts[i] = remaining;  // last positive weight takes the rest
            remaining = 0;
            break;
        }
        const double p = std::clamp(w / suffix[i], 0.0, 1.0);
        std::binomial_distribution<long long> binom(remaining, p);
        const long long c = binom(eng);
        counts[i] = c;
        remaining -= c;
    }
    return counts;
}

std::vector<int> sample_without_replacement(std::mt19937_64& eng, int n, int m) {
    if (m < 0 || m > n) throw DataError("sample_without_replacement: m out of range");
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < m; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(eng))]);
    }
    pool.resize(static_cast<std::size_t>(m));
    return pool;
}

}  // namespace zipscan::rng
