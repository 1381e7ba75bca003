#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rtslab {

// Ordering matches the feature-map value lists; "none" is added by the encoders.
enum class UnitType : std::uint8_t { Resource, Base, Barracks, Worker, Light, Heavy };

// Executable action set for the harvest task. Produce/Attack only exist as
// observation feature values in the encoders.
enum class ActionType : std::uint8_t { Noop = 0, Move = 1, Harvest = 2, Return = 3 };
inline constexpr int kNumActionTypes = 4;

enum class Direction : std::uint8_t { Up = 0, Right = 1, Down = 2, Left = 3 };
inline constexpr int kNumDirections = 4;

enum class Player : std::uint8_t { Player1 = 0, Player2 = 1, Neutral = 2 };

struct Position {
    int x = 0;  // column
    int y = 0;  // row

    friend bool operator==(const Position&, const Position&) = default;
};

Position step_towards(Position p, Direction d);

struct Activity {
    ActionType action = ActionType::Noop;
    Direction dir = Direction::Up;
    int ticks_remaining = 1;

    friend bool operator==(const Activity&, const Activity&) = default;
};

struct Unit {
    int id = 0;
    UnitType kind = UnitType::Worker;
    Player owner = Player::Neutral;
    Position pos;
    int hp = 1;
    // Remaining minerals for resource nodes, carried amount (0/1) for workers.
    int resources = 0;
    std::optional<Activity> activity;

    friend bool operator==(const Unit&, const Unit&) = default;
};

struct Command {
    int unit_id = 0;
    ActionType action = ActionType::Noop;
    Direction dir = Direction::Up;

    friend bool operator==(const Command&, const Command&) = default;
};

enum class EventKind : std::uint8_t { HarvestComplete, ReturnComplete };

struct RewardEvent {
    EventKind kind = EventKind::HarvestComplete;
    int unit_id = 0;
    long tick = 0;  // tick value after the step in which the activity completed

    friend bool operator==(const RewardEvent&, const RewardEvent&) = default;
};

inline constexpr double kEventReward = 10.0;

// Activity durations in ticks.
inline constexpr int kMoveDuration = 10;
inline constexpr int kHarvestDuration = 10;
inline constexpr int kReturnDuration = 10;

// Static hit points (no combat in the harvest task).
inline constexpr int kWorkerHp = 1;
inline constexpr int kBaseHp = 10;
inline constexpr int kResourceHp = 1;

struct TickOutcome;

class GameState {
public:
    GameState() = default;
    GameState(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    long tick() const { return tick_; }
    int stockpile(Player p) const;

    // Units sorted by ascending id.
    const std::vector<Unit>& units() const { return units_; }

    const Unit* find(int unit_id) const;
    const Unit* unit_at(Position p) const;
    bool in_bounds(Position p) const;

    // Adds a unit; throws std::invalid_argument on out-of-bounds, occupied
    // cell, duplicate id or a malformed unit.
    void add_unit(Unit u);

    // Sum of node minerals + worker carries + all stockpiles.
    long total_minerals() const;

    // Deterministic text form, units in ascending id order.
    std::string serialize() const;

    friend bool operator==(const GameState&, const GameState&) = default;

private:
    friend TickOutcome apply_tick(const GameState&, const std::optional<Command>&, Player);

    Unit* find_mut(int unit_id);

    int width_ = 0;
    int height_ = 0;
    long tick_ = 0;
    std::array<int, 2> stockpile_{0, 0};
    std::vector<Unit> units_;
};

struct TickOutcome {
    GameState state;
    std::vector<RewardEvent> events;
};

bool validate(const GameState& state, const Command& cmd, Player player = Player::Player1);

// Advances exactly one tick. An invalid command behaves as NOOP.
TickOutcome apply_tick(const GameState& state, const std::optional<Command>& cmd,
                  Player player = Player::Player1);

// Every valid command for the player's units plus one NOOP per idle worker,
// ordered by unit id, then action index, then direction index.
std::vector<Command> legal_commands(const GameState& state, Player player = Player::Player1);

std::string_view to_string(UnitType t);
std::string_view to_string(ActionType a);
std::string_view to_string(Direction d);
std::string_view to_string(Player p);
std::string_view to_string(EventKind k);

}  // namespace rtslab
