#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "rtslab/engine.hpp"

namespace rtslab {

enum class Mode : std::uint8_t { Global, Local };
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);

// --- Feature schema ---
//
// Planes in order: HitPoints, Resources, Owner, UnitType, Action.
// Global value lists:
//   HitPoints  0 1 2 3 4 5 >=6
//   Resources  0 1 2 3 4 5 >=6
//   Owner      player1 - player2
//   UnitType   - resource base barrack worker light heavy
//   Action     - move harvest return produce attack
// Local planes prepend "wall" at index 0 and shift everything else by one.
// Planes shorter than n_c are zero-padded; padding columns are never hot.
enum class Plane : std::uint8_t { HitPoints = 0, Resources, Owner, UnitType, Action };

inline constexpr int kNumPlanes = 5;
inline constexpr int kGlobalValues = 7;
inline constexpr int kLocalValues = 8;
inline constexpr int kBucketCap = 6;
inline constexpr int kWall = 0;

inline constexpr std::array<int, kNumPlanes> kGlobalCardinality{7, 7, 3, 7, 6};
inline constexpr std::array<int, kNumPlanes> kLocalCardinality{8, 8, 4, 8, 7};

namespace owner_index {
inline constexpr int kPlayer1 = 0;
inline constexpr int kNone = 1;
inline constexpr int kPlayer2 = 2;
}  // namespace owner_index

// Global (un-shifted) value index of every plane for one cell.
using CellFeatures = std::array<int, kNumPlanes>;
CellFeatures cell_features(const GameState& state, Position p);

struct ObsShape {
    int planes = kNumPlanes;
    int cells = 0;
    int values = 0;

    std::size_t size() const {
        return static_cast<std::size_t>(planes) * static_cast<std::size_t>(cells) *
               static_cast<std::size_t>(values);
    }
    friend bool operator==(const ObsShape&, const ObsShape&) = default;
};

// One-hot tensor laid out [plane][cell][value], cells row-major.
struct Observation {
    Mode mode = Mode::Global;
    ObsShape shape;
    std::vector<double> data;

    double at(int plane, int cell, int value) const {
        return data[(static_cast<std::size_t>(plane) * static_cast<std::size_t>(shape.cells) +
                     static_cast<std::size_t>(cell)) *
                        static_cast<std::size_t>(shape.values) +
                    static_cast<std::size_t>(value)];
    }
    // Index of the hot value in a (plane, cell) slice, or -1 if none is set.
    int hot(int plane, int cell) const;

    friend bool operator==(const Observation&, const Observation&) = default;
};

ObsShape global_shape(int width, int height);
ObsShape local_shape(int window);

Observation encode_global(const GameState& state);
// Window of radius `window` centered on the unit; out-of-bounds cells are wall
// on every plane. Throws std::invalid_argument for an unknown unit.
Observation encode_local(const GameState& state, int unit_id, int window);

struct GlobalAction {
    int x = 0;
    int y = 0;
    int atype = 0;
    int aparam = 0;

    friend bool operator==(const GlobalAction&, const GlobalAction&) = default;
};

struct LocalAction {
    int atype = 0;
    int aparam = 0;

    friend bool operator==(const LocalAction&, const LocalAction&) = default;
};

// Absent when the selected cell has no idle friendly worker or the command
// fails engine validation; the caller then steps with NOOP.
std::optional<Command> decode_global(const GlobalAction& a, const GameState& state);
std::optional<Command> decode_local(const LocalAction& a, int focus_unit_id,
                                    const GameState& state);

// Player-1 workers in ascending id order.
std::vector<int> worker_ids(const GameState& state);

// Focus unit for decision `index`: round-robin over the workers.
// Throws std::runtime_error if no worker is alive.
int rotation_next(const GameState& state, std::size_t index);

}  // namespace rtslab
