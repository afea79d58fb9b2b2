#include "zipscan/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zipscan/errors.hpp"

namespace zipscan {

namespace {

// x log(x / n) with the 0 log 0 = 0 convention.
inline double xlogratio(double x, double n) { return x > 0.0 ? x * std::log(x / n) : 0.0; }

inline double weight_at(std::span<const double> delta, std::size_t i) {
    return delta.empty() ? 0.0 : delta[i];
}

void check_delta(const RegionMap& map, const CaseData& data, std::span<const double> delta) {
    if (data.counts.size() != static_cast<std::size_t>(map.size())) {
        throw DataError("likelihood: counts misaligned with the map");
    }
    if (!delta.empty() && delta.size() != data.counts.size()) {
        throw DataError("likelihood: delta misaligned with the map");
    }
}

}  // namespace

ZoneAggregates aggregate_zone(const RegionMap& map, const CaseData& data,
                              std::span<const double> delta, const Zone& zone) {
    check_delta(map, data, delta);
    const std::size_t k = data.counts.size();

    ZoneAggregates agg;
    std::vector<std::uint8_t> inside(k, 0);
    for (int idx : zone.members) {
        if (idx < 0 || idx >= map.size()) throw DataError("aggregate_zone: member out of range");
        inside[static_cast<std::size_t>(idx)] = 1;
        const double w = 1.0 - weight_at(delta, static_cast<std::size_t>(idx));
        agg.cases_in += static_cast<double>(data.counts[static_cast<std::size_t>(idx)]) * w;
        agg.pop_in += map.region(idx).population * w;
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (inside[i]) continue;
        const double w = 1.0 - weight_at(delta, i);
        agg.cases_out += static_cast<double>(data.counts[i]) * w;
        agg.pop_out += map.region(static_cast<int>(i)).population * w;
    }
    return agg;
}

double poisson_log_lr(const ZoneAggregates& agg) {
    if (!(agg.pop_in > 0.0) || !(agg.pop_out > 0.0)) {
        throw DataError("poisson_log_lr: zero population inside or outside the zone");
    }
    // Indicator x_in/n_in > x_out/n_out, cross-multiplied.
    if (!(agg.cases_in * agg.pop_out > agg.cases_out * agg.pop_in)) return 0.0;
    const double log_lr = xlogratio(agg.cases_in, agg.pop_in) +
                          xlogratio(agg.cases_out, agg.pop_out) -
                          xlogratio(agg.cases_total(), agg.pop_total());
    return std::max(log_lr, 0.0);
}

NullMle zip_mle_null(const RegionMap& map, const CaseData& data, std::span<const double> delta) {
    check_delta(map, data, delta);
    const std::size_t k = data.counts.size();
    double cases = 0.0, pop = 0.0, dsum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double d = weight_at(delta, i);
        cases += static_cast<double>(data.counts[i]) * (1.0 - d);
        pop += map.region(static_cast<int>(i)).population * (1.0 - d);
        dsum += d;
    }
    if (!(pop > 0.0)) {
        throw DegenerateDataError("zip_mle_null: adjusted population is zero (all-unit delta)");
    }
    return NullMle{cases / pop, dsum / static_cast<double>(k)};
}

AltMle zip_mle_alt(const RegionMap& map, const CaseData& data, std::span<const double> delta,
                   const Zone& zone) {
    const ZoneAggregates agg = aggregate_zone(map, data, delta, zone);
    if (!(agg.pop_in > 0.0) || !(agg.pop_out > 0.0)) {
        throw DegenerateDataError("zip_mle_alt: adjusted population vanishes on one side of the zone");
    }
    double dsum = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) dsum += delta[i];
    return AltMle{agg.cases_in / agg.pop_in, agg.cases_out / agg.pop_out,
                  dsum / static_cast<double>(map.size())};
}

double zip_log_lr(const RegionMap& map, const CaseData& data, std::span<const double> delta,
                  const Zone& zone) {
    const ZoneAggregates agg = aggregate_zone(map, data, delta, zone);
    if (!(agg.pop_in > 0.0) || !(agg.pop_out > 0.0)) {
        throw DegenerateDataError("zip_log_lr: adjusted population vanishes on one side of the zone");
    }
    return poisson_log_lr(agg);
}

double incomplete_loglik(const RegionMap& map, const CaseData& data, const Zone* zone,
                         double p, double theta0, double thetaZ) {
    check_delta(map, data, {});
    const std::size_t k = data.counts.size();
    std::vector<std::uint8_t> inside(k, 0);
    if (zone != nullptr) {
        for (int idx : zone->members) inside[static_cast<std::size_t>(idx)] = 1;
    }

    double ll = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double mean = map.region(static_cast<int>(i)).population *
                            (zone != nullptr && inside[i] ? thetaZ : theta0);
        const long long x = data.counts[i];
        if (x == 0) {
            // p = 0 underflows the mixture for large means; use the exact limit.
            ll += p <= 0.0 ? -mean : std::log(p + (1.0 - p) * std::exp(-mean));
        } else {
            if (!(mean > 0.0) || p >= 1.0) return -std::numeric_limits<double>::infinity();
            ll += std::log1p(-p) - mean + static_cast<double>(x) * std::log(mean);
        }
    }
    return ll;
}

}  // namespace zipscan
