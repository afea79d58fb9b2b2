#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace zipscan {

/// One areal unit of the study map: identifier, centroid, at-risk population.
struct Region {
    std::string id;
    double x = 0.0;
    double y = 0.0;
    double population = 0.0;
};

/// Immutable study area. Region order is fixed at construction and all case
/// vectors are aligned to it. Safe to share across threads once built.
class RegionMap {
public:
    /// Throws DataError unless there are >= 2 regions, ids are unique and
    /// populations are nonnegative.
    explicit RegionMap(std::vector<Region> regions);

    int size() const { return static_cast<int>(regions_.size()); }
    const Region& region(int i) const { return regions_[static_cast<std::size_t>(i)]; }
    const std::vector<Region>& regions() const { return regions_; }
    double total_population() const { return total_population_; }

    /// Index of a region id, or -1 if unknown.
    int index_of(const std::string& id) const;

private:
    std::vector<Region> regions_;
    double total_population_ = 0.0;
    std::unordered_map<std::string, int> by_id_;
};

/// Observed counts aligned with a RegionMap, plus optional known structural
/// zero indicators (1 marks a region where observation is impossible).
struct CaseData {
    std::vector<long long> counts;
    std::optional<std::vector<std::uint8_t>> structural_zero;

    long long total_cases() const;
};

/// Throws DataError unless counts align with the map, are nonnegative, and
/// every region flagged as a structural zero has a zero count.
void validate_case_data(const RegionMap& map, const CaseData& data);

/// Structural-zero indicators as weights usable by the adjusted-sum formulas;
/// empty when the data carries no indicator column.
std::vector<double> delta_from_indicators(const CaseData& data);

/// Candidate cluster: member region indices in the order they were absorbed
/// by the growing window, with the seed region first.
struct Zone {
    std::vector<int> members;
    int center = -1;
    double pop_inside = 0.0;
    long long cases_inside = 0;  // filled when the zone is scored against data
};

/// Builds a validated Zone (members nonempty, unique, in range; population
/// accumulated from the map). center defaults to members.front().
Zone make_zone(const RegionMap& map, std::vector<int> members, int center = -1);

}  // namespace zipscan
