#include "rtslab/env.hpp"

#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace rtslab {

EnvConfig EnvConfig::for_map(const std::string& name_or_path, Mode mode, int window) {
    EnvConfig cfg;
    cfg.map_name = name_or_path;
    cfg.map = load_map(name_or_path);
    cfg.mode = mode;
    cfg.window = window;
    return cfg;
}

void EnvConfig::validate() const {
    if (episode_length <= 0) throw std::invalid_argument("episode_length must be positive");
    if (mode == Mode::Local && window < 1) throw std::invalid_argument("window must be >= 1");
    if (map.width <= 0 || map.height <= 0) throw std::invalid_argument("map is empty");
}

Env::Env(EnvConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    reset();
}

std::optional<int> Env::focus_unit() const {
    if (cfg_.mode != Mode::Local) return std::nullopt;
    return rotation_next(state_, decision_index_);
}

Observation Env::encode() const {
    if (cfg_.mode == Mode::Global) return encode_global(state_);
    return encode_local(state_, rotation_next(state_, decision_index_), cfg_.window);
}

const Observation& Env::reset() {
    state_ = cfg_.map.instantiate();
    decision_index_ = 0;
    episode_reward_ = 0.0;
    obs_ = encode();
    return obs_;
}

namespace {

nlohmann::json action_json(const EnvAction& action) {
    if (const auto* g = std::get_if<GlobalAction>(&action)) {
        return {{"kind", "global"}, {"indices", {g->x, g->y, g->atype, g->aparam}}};
    }
    if (const auto* l = std::get_if<LocalAction>(&action)) {
        return {{"kind", "local"}, {"indices", {l->atype, l->aparam}}};
    }
    return {{"kind", "raw"}, {"indices", nlohmann::json::array()}};
}

nlohmann::json command_json(const std::optional<Command>& c) {
    if (!c) return nullptr;
    return {{"unit", c->unit_id},
            {"action", std::string(to_string(c->action))},
            {"dir", std::string(to_string(c->dir))}};
}

}  // namespace

StepResult Env::step(const EnvAction& action) {
    if (done()) throw EpisodeDone();

    std::optional<Command> cmd;
    if (const auto* g = std::get_if<GlobalAction>(&action)) {
        if (cfg_.mode != Mode::Global) throw std::invalid_argument("global action in local env");
        cmd = decode_global(*g, state_);
    } else if (const auto* l = std::get_if<LocalAction>(&action)) {
        if (cfg_.mode != Mode::Local) throw std::invalid_argument("local action in global env");
        cmd = decode_local(*l, rotation_next(state_, decision_index_), state_);
    } else {
        cmd = std::get<RawCommand>(action).command;
        if (cmd && !validate(state_, *cmd)) cmd.reset();
    }
    const std::optional<int> acting_focus = focus_unit();

    TickOutcome outcome = apply_tick(state_, cmd);
    state_ = std::move(outcome.state);
    ++decision_index_;

    StepResult result;
    result.reward = kEventReward * static_cast<double>(outcome.events.size());
    episode_reward_ += result.reward;
    result.done = done();
    obs_ = encode();
    result.obs = obs_;
    result.info.tick = state_.tick();
    result.info.focus_unit = focus_unit();
    result.info.events = std::move(outcome.events);
    result.info.command = cmd;

    if (recorder_) {
        nlohmann::json line;
        line["tick"] = state_.tick();
        line["action"] = action_json(action);
        line["focus"] = acting_focus ? nlohmann::json(*acting_focus) : nlohmann::json(nullptr);
        line["command"] = command_json(cmd);
        line["reward"] = result.reward;
        nlohmann::json events = nlohmann::json::array();
        for (const auto& e : result.info.events) {
            events.push_back({{"kind", std::string(to_string(e.kind))}, {"unit", e.unit_id}});
        }
        line["events"] = std::move(events);
        line["state"] = state_.serialize();
        *recorder_ << line.dump() << '\n';
    }
    return result;
}

}  // namespace rtslab
