#include "rtslab/engine.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace rtslab {

Position step_towards(Position p, Direction d) {
    switch (d) {
        case Direction::Up: return {p.x, p.y - 1};
        case Direction::Right: return {p.x + 1, p.y};
        case Direction::Down: return {p.x, p.y + 1};
        case Direction::Left: return {p.x - 1, p.y};
    }
    return p;
}

GameState::GameState(int width, int height) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("map dimensions must be positive");
    }
}

int GameState::stockpile(Player p) const {
    if (p == Player::Neutral) return 0;
    return stockpile_[static_cast<std::size_t>(p)];
}

const Unit* GameState::find(int unit_id) const {
    auto it = std::lower_bound(units_.begin(), units_.end(), unit_id,
                               [](const Unit& u, int id) { return u.id < id; });
    if (it == units_.end() || it->id != unit_id) return nullptr;
    return &*it;
}

Unit* GameState::find_mut(int unit_id) {
    return const_cast<Unit*>(std::as_const(*this).find(unit_id));
}

const Unit* GameState::unit_at(Position p) const {
    for (const auto& u : units_) {
        if (u.pos == p) return &u;
    }
    return nullptr;
}

bool GameState::in_bounds(Position p) const {
    return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
}

void GameState::add_unit(Unit u) {
    if (!in_bounds(u.pos)) throw std::invalid_argument("unit position out of bounds");
    if (unit_at(u.pos)) throw std::invalid_argument("cell already occupied");
    if (find(u.id)) throw std::invalid_argument("duplicate unit id");
    if (u.hp < 0 || u.resources < 0) throw std::invalid_argument("negative unit attribute");
    if (u.kind == UnitType::Worker && u.resources > 1) {
        throw std::invalid_argument("worker carry must be 0 or 1");
    }
    if (u.kind == UnitType::Resource && u.owner != Player::Neutral) {
        throw std::invalid_argument("resource nodes must be neutral");
    }
    if (u.activity && u.activity->ticks_remaining < 1) {
        throw std::invalid_argument("activity must have at least one tick remaining");
    }
    auto it = std::lower_bound(units_.begin(), units_.end(), u.id,
                               [](const Unit& a, int id) { return a.id < id; });
    units_.insert(it, std::move(u));
}

long GameState::total_minerals() const {
    long total = stockpile_[0] + stockpile_[1];
    for (const auto& u : units_) {
        if (u.kind == UnitType::Resource || u.kind == UnitType::Worker) total += u.resources;
    }
    return total;
}

std::string GameState::serialize() const {
    std::ostringstream os;
    os << "size " << width_ << "x" << height_ << " tick " << tick_ << " stockpile "
       << stockpile_[0] << "," << stockpile_[1] << "\n";
    for (const auto& u : units_) {
        os << "unit " << u.id << " " << to_string(u.kind) << " " << to_string(u.owner) << " @"
           << u.pos.x << "," << u.pos.y << " hp=" << u.hp << " res=" << u.resources;
        if (u.activity) {
            os << " act=" << to_string(u.activity->action) << ":" << to_string(u.activity->dir)
               << ":" << u.activity->ticks_remaining;
        } else {
            os << " act=-";
        }
        os << "\n";
    }
    return os.str();
}

namespace {

int duration_of(ActionType a) {
    switch (a) {
        case ActionType::Move: return kMoveDuration;
        case ActionType::Harvest: return kHarvestDuration;
        case ActionType::Return: return kReturnDuration;
        case ActionType::Noop: break;
    }
    return 0;
}

bool is_idle_worker(const Unit& u, Player player) {
    return u.kind == UnitType::Worker && u.owner == player && !u.activity;
}

}  // namespace

bool validate(const GameState& state, const Command& cmd, Player player) {
    const Unit* u = state.find(cmd.unit_id);
    if (!u || !is_idle_worker(*u, player)) return false;

    const Position target = step_towards(u->pos, cmd.dir);
    switch (cmd.action) {
        case ActionType::Noop:
            return true;
        case ActionType::Move:
            return state.in_bounds(target) && state.unit_at(target) == nullptr;
        case ActionType::Harvest: {
            if (u->resources != 0 || !state.in_bounds(target)) return false;
            const Unit* node = state.unit_at(target);
            return node && node->kind == UnitType::Resource && node->resources >= 1;
        }
        case ActionType::Return: {
            if (u->resources != 1 || !state.in_bounds(target)) return false;
            const Unit* base = state.unit_at(target);
            return base && base->kind == UnitType::Base && base->owner == player;
        }
    }
    return false;
}

TickOutcome apply_tick(const GameState& state, const std::optional<Command>& cmd, Player player) {
    TickOutcome out{state, {}};
    GameState& next = out.state;
    const long completion_tick = state.tick_ + 1;

    if (cmd && cmd->action != ActionType::Noop && validate(state, *cmd, player)) {
        Unit* u = next.find_mut(cmd->unit_id);
        u->activity = Activity{cmd->action, cmd->dir, duration_of(cmd->action)};
    }

    std::vector<int> depleted;
    for (auto& u : next.units_) {
        if (!u.activity) continue;
        if (--u.activity->ticks_remaining > 0) continue;

        const Activity act = *u.activity;
        u.activity.reset();
        const Position target = step_towards(u.pos, act.dir);

        switch (act.action) {
            case ActionType::Move:
                // Cancelled if the cell was taken while moving.
                if (next.in_bounds(target) && next.unit_at(target) == nullptr) u.pos = target;
                break;
            case ActionType::Harvest: {
                const Unit* node_c = next.unit_at(target);
                if (!node_c || node_c->kind != UnitType::Resource || node_c->resources < 1 ||
                    u.resources != 0) {
                    break;
                }
                Unit* node = next.find_mut(node_c->id);
                node->resources -= 1;
                u.resources = 1;
                if (node->resources == 0) depleted.push_back(node->id);
                out.events.push_back({EventKind::HarvestComplete, u.id, completion_tick});
                break;
            }
            case ActionType::Return: {
                const Unit* base = next.unit_at(target);
                if (!base || base->kind != UnitType::Base || base->owner != u.owner ||
                    u.resources != 1 || u.owner == Player::Neutral) {
                    break;
                }
                u.resources = 0;
                next.stockpile_[static_cast<std::size_t>(u.owner)] += 1;
                out.events.push_back({EventKind::ReturnComplete, u.id, completion_tick});
                break;
            }
            case ActionType::Noop:
                break;
        }
    }

    std::erase_if(next.units_, [&](const Unit& u) {
        return std::find(depleted.begin(), depleted.end(), u.id) != depleted.end();
    });
    next.tick_ = completion_tick;
    return out;
}

std::vector<Command> legal_commands(const GameState& state, Player player) {
    std::vector<Command> out;
    for (const auto& u : state.units()) {
        if (!is_idle_worker(u, player)) continue;
        out.push_back({u.id, ActionType::Noop, Direction::Up});
        for (int a = 1; a < kNumActionTypes; ++a) {
            for (int d = 0; d < kNumDirections; ++d) {
                Command c{u.id, static_cast<ActionType>(a), static_cast<Direction>(d)};
                if (validate(state, c, player)) out.push_back(c);
            }
        }
    }
    return out;
}

std::string_view to_string(UnitType t) {
    switch (t) {
        case UnitType::Resource: return "resource";
        case UnitType::Base: return "base";
        case UnitType::Barracks: return "barracks";
        case UnitType::Worker: return "worker";
        case UnitType::Light: return "light";
        case UnitType::Heavy: return "heavy";
    }
    return "?";
}

std::string_view to_string(ActionType a) {
    switch (a) {
        case ActionType::Noop: return "noop";
        case ActionType::Move: return "move";
        case ActionType::Harvest: return "harvest";
        case ActionType::Return: return "return";
    }
    return "?";
}

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::Up: return "up";
        case Direction::Right: return "right";
        case Direction::Down: return "down";
        case Direction::Left: return "left";
    }
    return "?";
}

std::string_view to_string(Player p) {
    switch (p) {
        case Player::Player1: return "p1";
        case Player::Player2: return "p2";
        case Player::Neutral: return "neutral";
    }
    return "?";
}

std::string_view to_string(EventKind k) {
    return k == EventKind::HarvestComplete ? "harvest" : "return";
}

}  // namespace rtslab
