#include "zipscan/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "hex_lattice.hpp"
#include "zipscan/errors.hpp"

namespace zipscan {

int hex_cell_index(int row, int col) {
    if (row < 0 || row >= hexlat::kRows || col < 0 || col >= hexlat::row_length(row)) {
        throw DataError("hex_cell_index: cell (" + std::to_string(row) + "," +
                        std::to_string(col) + ") is outside the lattice");
    }
    return (row / 2) * 27 + (row % 2) * 14 + col;
}

namespace {

using RC = std::pair<int, int>;

std::vector<int> cells(const std::vector<RC>& rc) {
    std::vector<int> idx;
    idx.reserve(rc.size());
    for (const auto& [r, c] : rc) idx.push_back(hex_cell_index(r, c));
    return idx;
}

// All cells within `radius` of (row, col) on the unjittered lattice.
// radius 1.05 is the 7-cell flower, 2.05 the 19-cell disc.
std::vector<int> disc(int row, int col, double radius) {
    const double cx = hexlat::cell_x(row, col);
    const double cy = hexlat::cell_y(row);
    std::vector<int> idx;
    for (int r = 0; r < hexlat::kRows; ++r) {
        for (int c = 0; c < hexlat::row_length(r); ++c) {
            const double dx = hexlat::cell_x(r, c) - cx;
            const double dy = hexlat::cell_y(r) - cy;
            if (dx * dx + dy * dy <= radius * radius) idx.push_back(hex_cell_index(r, c));
        }
    }
    return idx;
}

std::vector<int> concat(std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// Clusters. A0-A4 reuse cluster A; B-D sit in other parts of the map.
// Cluster A is a 31-cell disc: large enough that excising a handful of
// structural zeros leaves the adjusted methods most of their evidence,
// while the unadjusted scan loses the window's center.
std::vector<int> cluster_a() { return disc(7, 4, 2.70); }
std::vector<int> cluster_b() { return disc(3, 10, 2.05); }
std::vector<int> cluster_c() { return disc(12, 5, 1.05); }
std::vector<int> cluster_d() {
    return cells({{7, 10}, {8, 10}, {9, 10}, {10, 10}, {11, 10}, {12, 10},
                  {12, 9}, {12, 8}, {12, 7}, {12, 6}});
}

// The shared structural zeros of scenarios A-D: a contiguous line crossing
// cluster A, four scattered cells inside cluster B, the center of cluster C,
// and three cells interacting with cluster D (one mid-arm, two cutting off
// its lower-left corner).
std::vector<int> zeros_shared() {
    return cells({{4, 4}, {5, 4}, {6, 4}, {7, 4}, {8, 4}, {9, 4}, {10, 4},
                  {1, 9}, {2, 11}, {4, 10}, {5, 9},
                  {12, 5},
                  {9, 10}, {12, 8}, {12, 9}});
}

// Progressive family: a pool of 15 cells far from cluster A; A2-A4 move a
// growing number of zeros from the tail of the pool into the cluster.
std::vector<RC> far_pool() {
    return {{0, 11}, {1, 11}, {2, 11}, {3, 11}, {4, 11}, {5, 11}, {6, 11}, {7, 11},
            {8, 11}, {9, 11}, {10, 11}, {11, 11}, {13, 10}, {13, 11}, {14, 11}};
}

std::vector<int> zeros_progressive(int moved_inside) {
    // Filling order traces the first ring around the cluster center, so A4's
    // zeros isolate the heart of the cluster from its live outer cells.
    static const std::vector<RC> inside_order = {{7, 3}, {7, 5}, {6, 4}, {8, 4}, {6, 5}, {8, 5}};
    const std::vector<RC> pool = far_pool();
    std::vector<RC> rc(pool.begin(), pool.end() - moved_inside);
    rc.insert(rc.end(), inside_order.begin(), inside_order.begin() + moved_inside);
    return cells(rc);
}

Scenario assemble(const RegionMap& map, std::string name, std::vector<int> cluster,
                  std::vector<int> zeros) {
    Scenario s;
    s.name = std::move(name);
    s.true_cluster = std::move(cluster);
    s.structural_zeros = std::move(zeros);
    s.total_cases = 507;
    s.target_power = 0.999;
    const double r = calibrate_risks(map, s.true_cluster, s.total_cases, s.target_power);
    s.relative_risks = risk_vector(map, s.true_cluster, r);
    validate_scenario(map, s);
    return s;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
    return {"A0", "A", "B", "C", "D", "A1", "A2", "A3", "A4"};
}

Scenario builtin_scenario(const std::string& name, const RegionMap& hex_map) {
    if (hex_map.size() != kHexMapCells) {
        throw DataError("builtin_scenario: expected the 203-cell hex map");
    }
    if (name == "A0") return assemble(hex_map, name, cluster_a(), {});
    if (name == "A") return assemble(hex_map, name, cluster_a(), zeros_shared());
    if (name == "B") return assemble(hex_map, name, cluster_b(), zeros_shared());
    if (name == "C") return assemble(hex_map, name, cluster_c(), zeros_shared());
    if (name == "D") return assemble(hex_map, name, cluster_d(), zeros_shared());
    if (name == "A1") return assemble(hex_map, name, cluster_a(), zeros_progressive(0));
    if (name == "A2") return assemble(hex_map, name, cluster_a(), zeros_progressive(2));
    if (name == "A3") return assemble(hex_map, name, cluster_a(), zeros_progressive(4));
    if (name == "A4") return assemble(hex_map, name, cluster_a(), zeros_progressive(6));
    throw DataError("builtin_scenario: unknown scenario '" + name + "'");
}

Scenario load_scenario_json(const std::string& path, const RegionMap& map) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scenario file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("scenario file " + path + ": " + e.what());
    }

    auto ids_to_indices = [&](const nlohmann::json& arr, const char* field) {
        std::vector<int> idx;
        if (!arr.is_array()) throw DataError("scenario file: '" + std::string(field) + "' must be an array");
        for (const auto& v : arr) {
            const std::string id = v.get<std::string>();
            const int i = map.index_of(id);
            if (i < 0) throw DataError("scenario file: unknown region id '" + id + "'");
            idx.push_back(i);
        }
        return idx;
    };

    Scenario s;
    try {
        s.name = j.at("name").get<std::string>();
        s.true_cluster = ids_to_indices(j.at("true_cluster"), "true_cluster");
        s.structural_zeros = ids_to_indices(j.at("structural_zeros"), "structural_zeros");
        s.total_cases = j.at("total_cases").get<long long>();
        s.target_power = j.at("target_power").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("scenario file " + path + ": " + e.what());
    }
    const double r = calibrate_risks(map, s.true_cluster, s.total_cases, s.target_power);
    s.relative_risks = risk_vector(map, s.true_cluster, r);
    validate_scenario(map, s);
    return s;
}

void save_scenario_json(const Scenario& scenario, const RegionMap& map, const std::string& path) {
    nlohmann::ordered_json j;
    j["name"] = scenario.name;
    auto ids = [&](const std::vector<int>& idx) {
        std::vector<std::string> out;
        out.reserve(idx.size());
        for (int i : idx) out.push_back(map.region(i).id);
        return out;
    };
    j["true_cluster"] = ids(scenario.true_cluster);
    j["structural_zeros"] = ids(scenario.structural_zeros);
    j["total_cases"] = scenario.total_cases;
    j["target_power"] = scenario.target_power;

    std::ofstream out(path);
    if (!out) throw DataError("cannot write scenario file " + path);
    out << j.dump(2) << "\n";
}

}  // namespace zipscan
