#pragma once

#include <cstddef>
#include <vector>

#include "zipscan/region_map.hpp"

namespace zipscan {

/// Permutation of all region indices starting at `center`, sorted by
/// ascending Euclidean distance from the center's centroid. Distance ties
/// are broken by ascending region index, so the order is well defined even
/// on unjittered lattices. Throws DataError on an invalid index.
std::vector<int> nearest_neighbor_order(const RegionMap& map, int center);

/// Precomputed circular-window candidate zones for one map: for every center
/// the nearest-neighbor prefixes whose population does not exceed
/// max_pop_fraction of the total, deduplicated by member set. Zones reachable
/// from several centers are attributed to the lowest (center, prefix) pair.
///
/// The map must outlive the family. Immutable once built; scans share it.
class ZoneFamily {
public:
    explicit ZoneFamily(const RegionMap& map, double max_pop_fraction = 0.5);

    const RegionMap& map() const { return *map_; }
    double max_pop_fraction() const { return max_pop_fraction_; }

    /// Number of canonical (deduplicated) zones.
    std::size_t zone_count() const { return zone_count_; }

    /// Nearest-neighbor order for a center.
    const std::vector<int>& neighbor_order(int center) const {
        return order_[static_cast<std::size_t>(center)];
    }

    /// Number of admissible prefixes for a center (prefix lengths 1..count).
    int prefix_count(int center) const { return prefix_count_[static_cast<std::size_t>(center)]; }

    /// True if the prefix of this length rooted at this center is the
    /// canonical representative of its member set.
    bool is_canonical(int center, int prefix_len) const {
        return canonical_[static_cast<std::size_t>(center)][static_cast<std::size_t>(prefix_len - 1)] != 0;
    }

    /// Materializes all canonical zones in (center, prefix length) order.
    std::vector<Zone> zones() const;

private:
    const RegionMap* map_;
    double max_pop_fraction_;
    std::vector<std::vector<int>> order_;
    std::vector<int> prefix_count_;
    std::vector<std::vector<std::uint8_t>> canonical_;
    std::size_t zone_count_ = 0;
};

/// Convenience wrapper: ZoneFamily(map, max_pop_fraction).zones().
std::vector<Zone> enumerate_circular_zones(const RegionMap& map, double max_pop_fraction = 0.5);

}  // namespace zipscan
