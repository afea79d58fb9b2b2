// Regenerates the shipped scenario files under data/scenarios/ from the
// built-in definitions. Usage: zipscan_scenario_dump <output-dir>

#include <filesystem>
#include <iostream>

#include "zipscan/scenarios.hpp"
#include "zipscan/simulate.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: zipscan_scenario_dump <output-dir>\n";
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);

    const zipscan::RegionMap map = zipscan::build_hex_map(0);
    for (const std::string& name : zipscan::builtin_scenario_names()) {
        const zipscan::Scenario s = zipscan::builtin_scenario(name, map);
        const std::filesystem::path path = dir / (name + ".json");
        zipscan::save_scenario_json(s, map, path.string());
        std::cout << path.string() << "\n";
    }
    return 0;
}
