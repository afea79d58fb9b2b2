#include "zipscan/zones.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <unordered_set>

#include "zipscan/errors.hpp"
#include "zipscan/rng.hpp"

namespace zipscan {

namespace {

struct MemberSetHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::uint64_t h = 0x243F6A8885A308D3ull;
        for (int x : v) h = rng::splitmix64(h ^ static_cast<std::uint64_t>(x));
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

std::vector<int> nearest_neighbor_order(const RegionMap& map, int center) {
    const int k = map.size();
    if (center < 0 || center >= k) throw DataError("nearest_neighbor_order: invalid region index");

    const double cx = map.region(center).x;
    const double cy = map.region(center).y;

    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::swap(order[0], order[static_cast<std::size_t>(center)]);

    std::vector<double> dist2(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const double dx = map.region(i).x - cx;
        const double dy = map.region(i).y - cy;
        dist2[static_cast<std::size_t>(i)] = dx * dx + dy * dy;
    }
    // The center stays first even if another region shares its centroid.
    std::sort(order.begin() + 1, order.end(), [&](int a, int b) {
        const double da = dist2[static_cast<std::size_t>(a)];
        const double db = dist2[static_cast<std::size_t>(b)];
        if (da != db) return da < db;
        return a < b;
    });
    return order;
}

ZoneFamily::ZoneFamily(const RegionMap& map, double max_pop_fraction)
    : map_(&map), max_pop_fraction_(max_pop_fraction) {
    if (!(max_pop_fraction > 0.0) || max_pop_fraction > 1.0) {
        throw DataError("ZoneFamily: max_pop_fraction must lie in (0, 1]");
    }
    const int k = map.size();
    // Tiny slack absorbs accumulation dust when a prefix hits the bound exactly.
    const double bound = max_pop_fraction * map.total_population() * (1.0 + 1e-12);

    order_.resize(static_cast<std::size_t>(k));
    prefix_count_.assign(static_cast<std::size_t>(k), 0);
    canonical_.resize(static_cast<std::size_t>(k));

    std::unordered_set<std::vector<int>, MemberSetHash> seen;
    std::vector<int> sorted_members;

    for (int center = 0; center < k; ++center) {
        auto& order = order_[static_cast<std::size_t>(center)];
        order = nearest_neighbor_order(map, center);

        double pop = 0.0;
        int len = 0;
        for (int j = 0; j < k; ++j) {
            pop += map.region(order[static_cast<std::size_t>(j)]).population;
            if (pop > bound) break;
            len = j + 1;
        }
        prefix_count_[static_cast<std::size_t>(center)] = len;

        auto& flags = canonical_[static_cast<std::size_t>(center)];
        flags.assign(static_cast<std::size_t>(len), 0);
        sorted_members.clear();
        for (int j = 0; j < len; ++j) {
            sorted_members.insert(
                std::upper_bound(sorted_members.begin(), sorted_members.end(),
                                 order[static_cast<std::size_t>(j)]),
                order[static_cast<std::size_t>(j)]);
            if (seen.insert(sorted_members).second) {
                flags[static_cast<std::size_t>(j)] = 1;
                ++zone_count_;
            }
        }
    }
}

std::vector<Zone> ZoneFamily::zones() const {
    std::vector<Zone> result;
    result.reserve(zone_count_);
    const int k = map_->size();
    for (int center = 0; center < k; ++center) {
        const auto& order = order_[static_cast<std::size_t>(center)];
        const int len = prefix_count_[static_cast<std::size_t>(center)];
        double pop = 0.0;
        for (int j = 0; j < len; ++j) {
            pop += map_->region(order[static_cast<std::size_t>(j)]).population;
            if (!is_canonical(center, j + 1)) continue;
            Zone zone;
            zone.center = center;
            zone.members.assign(order.begin(), order.begin() + j + 1);
            zone.pop_inside = pop;
            result.push_back(std::move(zone));
        }
    }
    return result;
}

std::vector<Zone> enumerate_circular_zones(const RegionMap& map, double max_pop_fraction) {
    return ZoneFamily(map, max_pop_fraction).zones();
}

}  // namespace zipscan
