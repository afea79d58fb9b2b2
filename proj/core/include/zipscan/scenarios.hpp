#pragma once

#include <string>
#include <vector>

#include "zipscan/region_map.hpp"
#include "zipscan/simulate.hpp"

namespace zipscan {

inline constexpr int kHexMapCells = 203;

/// Region index of hex-map cell (row, col). Rows 0..14 alternate 14 and 13
/// cells; throws DataError out of range.
int hex_cell_index(int row, int col);

/// Names of the built-in designs: A0, A, B, C, D, A1, A2, A3, A4.
std::vector<std::string> builtin_scenario_names();

/// A built-in design instantiated on (a map shaped like) the hex map, with
/// risks calibrated for its cluster. A-D share one structural-zero set and
/// differ in cluster placement; A0-A4 share scenario A's cluster, with A0
/// holding no structural zeros and A1-A4 moving them stepwise into the
/// cluster. Throws DataError for unknown names or non-hex maps.
Scenario builtin_scenario(const std::string& name, const RegionMap& hex_map);

/// Scenario file I/O. The JSON schema is
///   {name, true_cluster: [ids], structural_zeros: [ids],
///    total_cases, target_power}
/// with region ids resolved against the map; risks are recalibrated on load.
Scenario load_scenario_json(const std::string& path, const RegionMap& map);
void save_scenario_json(const Scenario& scenario, const RegionMap& map, const std::string& path);

}  // namespace zipscan
