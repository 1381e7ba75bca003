#include "rtslab/agents.hpp"

#include <array>
#include <deque>

namespace rtslab {

std::optional<Command> random_act(const GameState& state, Rng& rng) {
    const auto legal = legal_commands(state);
    if (legal.empty()) return std::nullopt;
    return legal[rng.below(legal.size())];
}

namespace {

constexpr std::array<Direction, 4> kDirs{Direction::Up, Direction::Right, Direction::Down,
                                         Direction::Left};

std::optional<Direction> adjacent_target(const GameState& state, const Unit& w, bool want_base) {
    for (Direction d : kDirs) {
        const Unit* t = state.unit_at(step_towards(w.pos, d));
        if (!t) continue;
        if (want_base && t->kind == UnitType::Base && t->owner == w.owner) return d;
        if (!want_base && t->kind == UnitType::Resource && t->resources > 0) return d;
    }
    return std::nullopt;
}

// First step of a shortest path to any free cell adjacent to a goal unit.
std::optional<Direction> first_step(const GameState& state, const Unit& w, bool want_base) {
    const int width = state.width();
    const int height = state.height();
    std::vector<char> blocked(static_cast<std::size_t>(width * height), 0);
    auto idx = [&](Position p) { return static_cast<std::size_t>(p.y * width + p.x); };
    for (const auto& u : state.units()) {
        if (u.id == w.id) continue;
        blocked[idx(u.pos)] = 1;
        if (u.activity && u.activity->action == ActionType::Move) {
            const Position t = step_towards(u.pos, u.activity->dir);
            if (state.in_bounds(t)) blocked[idx(t)] = 1;
        }
    }
    auto is_goal = [&](Position p) {
        for (Direction d : kDirs) {
            const Unit* t = state.unit_at(step_towards(p, d));
            if (!t) continue;
            if (want_base && t->kind == UnitType::Base && t->owner == w.owner) return true;
            if (!want_base && t->kind == UnitType::Resource && t->resources > 0) return true;
        }
        return false;
    };

    std::vector<int> first(static_cast<std::size_t>(width * height), -1);
    std::vector<char> seen(static_cast<std::size_t>(width * height), 0);
    std::deque<Position> queue;
    seen[idx(w.pos)] = 1;
    for (Direction d : kDirs) {
        const Position n = step_towards(w.pos, d);
        if (!state.in_bounds(n) || blocked[idx(n)] || seen[idx(n)]) continue;
        seen[idx(n)] = 1;
        first[idx(n)] = static_cast<int>(d);
        queue.push_back(n);
    }
    while (!queue.empty()) {
        const Position p = queue.front();
        queue.pop_front();
        if (is_goal(p)) return static_cast<Direction>(first[idx(p)]);
        for (Direction d : kDirs) {
            const Position n = step_towards(p, d);
            if (!state.in_bounds(n) || blocked[idx(n)] || seen[idx(n)]) continue;
            seen[idx(n)] = 1;
            first[idx(n)] = first[idx(p)];
            queue.push_back(n);
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<Command> scripted_optimal_act(const GameState& state, long remaining_ticks) {
    if (remaining_ticks <= 0) return std::nullopt;
    for (const auto& u : state.units()) {
        if (u.kind != UnitType::Worker || u.owner != Player::Player1 || u.activity) continue;
        const bool carrying = u.resources > 0;
        if (auto d = adjacent_target(state, u, carrying)) {
            return Command{u.id, carrying ? ActionType::Return : ActionType::Harvest, *d};
        }
        if (auto d = first_step(state, u, carrying)) {
            return Command{u.id, ActionType::Move, *d};
        }
    }
    return std::nullopt;
}

EnvAction policy_act(const a2c::Networks& nets, const Observation& obs, Rng& rng) {
    if (obs.mode != nets.mode) {
        throw std::invalid_argument("checkpoint mode " + std::string(to_string(nets.mode)) +
                                    " does not match observation mode " +
                                    std::string(to_string(obs.mode)));
    }
    if (obs.data.size() != nets.policy.input_size()) {
        throw std::invalid_argument("observation width does not match the policy input");
    }
    const nn::MlpCache cache = nn::forward(nets.policy, obs.data);
    const auto heads = nn::head_distributions(cache.output(), nets.layout);
    const std::vector<int> idx = nn::sample_heads(heads, rng);
    return a2c::to_env_action(nets.mode, idx);
}

EnvAction NoopAgent::act(const Env&, Rng&) { return RawCommand{}; }

EnvAction RandomAgent::act(const Env& env, Rng& rng) {
    return RawCommand{random_act(env.state(), rng)};
}

EnvAction ScriptedAgent::act(const Env& env, Rng&) {
    return RawCommand{
        scripted_optimal_act(env.state(), env.config().episode_length - env.tick())};
}

EnvAction PolicyAgent::act(const Env& env, Rng& rng) {
    return policy_act(nets_, env.observation(), rng);
}

}  // namespace rtslab
