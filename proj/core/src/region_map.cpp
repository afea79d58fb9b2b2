#include "zipscan/region_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zipscan/errors.hpp"

namespace zipscan {

RegionMap::RegionMap(std::vector<Region> regions) : regions_(std::move(regions)) {
    if (regions_.size() < 2) throw DataError("RegionMap: at least 2 regions required");
    by_id_.reserve(regions_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < regions_.size(); ++i) {
        const Region& r = regions_[i];
        if (r.id.empty()) throw DataError("RegionMap: empty region id at index " + std::to_string(i));
        if (!(r.population >= 0.0)) {
            throw DataError("RegionMap: negative or non-finite population for region " + r.id);
        }
        if (!by_id_.emplace(r.id, static_cast<int>(i)).second) {
            throw DataError("RegionMap: duplicate region id " + r.id);
        }
        total += r.population;
    }
    total_population_ = total;
}

int RegionMap::index_of(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? -1 : it->second;
}

long long CaseData::total_cases() const {
    return std::accumulate(counts.begin(), counts.end(), 0LL);
}

void validate_case_data(const RegionMap& map, const CaseData& data) {
    const std::size_t k = static_cast<std::size_t>(map.size());
    if (data.counts.size() != k) {
        throw DataError("CaseData: expected " + std::to_string(k) + " counts, got " +
                        std::to_string(data.counts.size()));
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (data.counts[i] < 0) {
            throw DataError("CaseData: negative count for region " + map.region(static_cast<int>(i)).id);
        }
    }
    if (data.structural_zero) {
        const auto& d = *data.structural_zero;
        if (d.size() != k) {
            throw DataError("CaseData: structural_zero length mismatches the map");
        }
        for (std::size_t i = 0; i < k; ++i) {
            if (d[i] != 0 && d[i] != 1) {
                throw DataError("CaseData: structural_zero values must be 0 or 1");
            }
            if (d[i] == 1 && data.counts[i] > 0) {
                throw DataError("CaseData: region " + map.region(static_cast<int>(i)).id +
                                " is flagged as a structural zero but has " +
                                std::to_string(data.counts[i]) +
                                " cases; a structural zero cannot produce cases");
            }
        }
    }
}

std::vector<double> delta_from_indicators(const CaseData& data) {
    std::vector<double> delta;
    if (data.structural_zero) {
        delta.assign(data.structural_zero->begin(), data.structural_zero->end());
    }
    return delta;
}

Zone make_zone(const RegionMap& map, std::vector<int> members, int center) {
    if (members.empty()) throw DataError("Zone: empty member list");
    std::vector<int> sorted = members;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw DataError("Zone: duplicate member index");
    }
    if (sorted.front() < 0 || sorted.back() >= map.size()) {
        throw DataError("Zone: member index out of range");
    }
    Zone zone;
    zone.center = center >= 0 ? center : members.front();
    if (zone.center < 0 || zone.center >= map.size()) {
        throw DataError("Zone: center index out of range");
    }
    zone.members = std::move(members);
    for (int idx : zone.members) zone.pop_inside += map.region(idx).population;
    return zone;
}

}  // namespace zipscan
