#include "rtslab/repr.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rtslab {

std::string_view to_string(Mode m) { return m == Mode::Global ? "global" : "local"; }

Mode parse_mode(std::string_view s) {
    if (s == "global") return Mode::Global;
    if (s == "local") return Mode::Local;
    throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

namespace {

int bucket(int v) { return std::clamp(v, 0, kBucketCap); }

void check_action_indices(int atype, int aparam) {
    if (atype < 0 || atype >= kNumActionTypes || aparam < 0 || aparam >= kNumDirections) {
        throw std::out_of_range("action indices out of range");
    }
}

}  // namespace

CellFeatures cell_features(const GameState& state, Position p) {
    const Unit* u = state.unit_at(p);
    if (!u) return {0, 0, owner_index::kNone, 0, 0};

    CellFeatures f{};
    f[0] = bucket(u->hp);
    switch (u->kind) {
        case UnitType::Base: f[1] = bucket(state.stockpile(u->owner)); break;
        case UnitType::Resource:
        case UnitType::Worker: f[1] = bucket(u->resources); break;
        default: f[1] = 0; break;
    }
    switch (u->owner) {
        case Player::Player1: f[2] = owner_index::kPlayer1; break;
        case Player::Player2: f[2] = owner_index::kPlayer2; break;
        case Player::Neutral: f[2] = owner_index::kNone; break;
    }
    f[3] = 1 + static_cast<int>(u->kind);
    f[4] = u->activity ? static_cast<int>(u->activity->action) : 0;
    return f;
}

int Observation::hot(int plane, int cell) const {
    for (int v = 0; v < shape.values; ++v) {
        if (at(plane, cell, v) != 0.0) return v;
    }
    return -1;
}

ObsShape global_shape(int width, int height) { return {kNumPlanes, width * height, kGlobalValues}; }

ObsShape local_shape(int window) {
    const int side = 2 * window + 1;
    return {kNumPlanes, side * side, kLocalValues};
}

namespace {

void set_hot(Observation& obs, int plane, int cell, int value) {
    obs.data[(static_cast<std::size_t>(plane) * static_cast<std::size_t>(obs.shape.cells) +
              static_cast<std::size_t>(cell)) *
                 static_cast<std::size_t>(obs.shape.values) +
             static_cast<std::size_t>(value)] = 1.0;
}

}  // namespace

Observation encode_global(const GameState& state) {
    Observation obs{Mode::Global, global_shape(state.width(), state.height()), {}};
    obs.data.assign(obs.shape.size(), 0.0);
    for (int y = 0; y < state.height(); ++y) {
        for (int x = 0; x < state.width(); ++x) {
            const CellFeatures f = cell_features(state, {x, y});
            const int cell = y * state.width() + x;
            for (int p = 0; p < kNumPlanes; ++p) set_hot(obs, p, cell, f[static_cast<std::size_t>(p)]);
        }
    }
    return obs;
}

Observation encode_local(const GameState& state, int unit_id, int window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    const Unit* u = state.find(unit_id);
    if (!u) throw std::invalid_argument("unknown unit id " + std::to_string(unit_id));

    Observation obs{Mode::Local, local_shape(window), {}};
    obs.data.assign(obs.shape.size(), 0.0);
    const int side = 2 * window + 1;
    for (int dy = -window; dy <= window; ++dy) {
        for (int dx = -window; dx <= window; ++dx) {
            const Position p{u->pos.x + dx, u->pos.y + dy};
            const int cell = (dy + window) * side + (dx + window);
            if (!state.in_bounds(p)) {
                for (int pl = 0; pl < kNumPlanes; ++pl) set_hot(obs, pl, cell, kWall);
                continue;
            }
            const CellFeatures f = cell_features(state, p);
            for (int pl = 0; pl < kNumPlanes; ++pl) {
                set_hot(obs, pl, cell, f[static_cast<std::size_t>(pl)] + 1);
            }
        }
    }
    return obs;
}

std::optional<Command> decode_global(const GlobalAction& a, const GameState& state) {
    if (a.x < 0 || a.y < 0 || a.x >= state.width() || a.y >= state.height()) {
        throw std::out_of_range("action coordinates out of range");
    }
    check_action_indices(a.atype, a.aparam);
    const Unit* u = state.unit_at({a.x, a.y});
    if (!u || u->kind != UnitType::Worker || u->owner != Player::Player1 || u->activity) {
        return std::nullopt;
    }
    Command c{u->id, static_cast<ActionType>(a.atype), static_cast<Direction>(a.aparam)};
    if (!validate(state, c)) return std::nullopt;
    return c;
}

std::optional<Command> decode_local(const LocalAction& a, int focus_unit_id,
                                    const GameState& state) {
    check_action_indices(a.atype, a.aparam);
    Command c{focus_unit_id, static_cast<ActionType>(a.atype), static_cast<Direction>(a.aparam)};
    if (!validate(state, c)) return std::nullopt;
    return c;
}

std::vector<int> worker_ids(const GameState& state) {
    std::vector<int> ids;
    for (const auto& u : state.units()) {
        if (u.kind == UnitType::Worker && u.owner == Player::Player1) ids.push_back(u.id);
    }
    return ids;
}

int rotation_next(const GameState& state, std::size_t index) {
    const auto ids = worker_ids(state);
    if (ids.empty()) throw std::runtime_error("no workers alive to focus");
    return ids[index % ids.size()];
}

}  // namespace rtslab
