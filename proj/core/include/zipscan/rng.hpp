#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace zipscan::rng {

/// SplitMix64 mixing step. Used to derive well-separated engine seeds from
/// (run seed, stream tag, stream index) so that every Monte Carlo replica
/// owns an independent generator regardless of scheduling.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Purpose tags keeping unrelated random streams of one run disjoint.
enum class Stream : std::uint64_t {
    map_jitter = 1,
    null_replica = 2,
    study_draw = 3,
    generic = 4,
};

/// Engine for stream (seed, stream, index). Pure function of its arguments.
std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t index);

/// Multinomial draw via sequential conditional binomials, O(weights.size()).
/// Entries with nonpositive weight receive count 0. Throws DegenerateDataError
/// if total > 0 and no weight is positive.
std::vector<long long> multinomial(std::mt19937_64& eng, long long total,
                                   std::span<const double> weights);

/// Draws m distinct values from {0,...,n-1} by partial Fisher-Yates shuffle.
/// The result is in draw order, not sorted.
std::vector<int> sample_without_replacement(std::mt19937_64& eng, int n, int m);

}  // namespace zipscan::rng
