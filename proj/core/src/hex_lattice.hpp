#pragma once

// Ideal geometry of the 203-cell hexagonal benchmark map: 15 rows that
// alternate 14 and 13 cells, odd rows offset by half a pitch. Scenario
// definitions use these unjittered coordinates so cluster membership does
// not depend on the jitter seed.

namespace zipscan::hexlat {

inline constexpr int kRows = 15;
inline constexpr double kRowHeight = 0.8660254037844386;  // sqrt(3)/2 * pitch

inline constexpr int row_length(int row) { return row % 2 == 0 ? 14 : 13; }
inline constexpr double cell_x(int row, int col) {
    return static_cast<double>(col) + (row % 2 == 0 ? 0.0 : 0.5);
}
inline constexpr double cell_y(int row) { return static_cast<double>(row) * kRowHeight; }

}  // namespace zipscan::hexlat
