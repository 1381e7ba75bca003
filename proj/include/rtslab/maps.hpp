#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rtslab/engine.hpp"

namespace rtslab {

inline constexpr int kDefaultNodeResources = 230;

// Legend: '.' empty, 'R' resource node, 'B' player-1 base, 'W' player-1
// worker, 'E' player-2 base. An optional first line `resources=<n>` sets the
// minerals held by every resource node.
struct MapSpec {
    int width = 0;
    int height = 0;
    std::vector<std::string> rows;
    int node_resources = kDefaultNodeResources;

    // Units get ids 1, 2, ... in row-major scan order.
    GameState instantiate() const;

    friend bool operator==(const MapSpec&, const MapSpec&) = default;
};

class MapError : public std::runtime_error {
public:
    MapError(const std::string& what, int row, int col);
    int row() const { return row_; }
    int col() const { return col_; }

private:
    int row_;
    int col_;
};

MapSpec parse_map(std::string_view text);
std::string serialize_map(const MapSpec& spec);

// "4x4", "6x6" or "8x8"; throws std::invalid_argument otherwise.
MapSpec builtin_map(std::string_view name);
std::vector<std::string> builtin_map_names();

// Built-in name, or a path to a map file.
MapSpec load_map(const std::string& name_or_path);

}  // namespace rtslab
