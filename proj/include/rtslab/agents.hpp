#pragma once

#include <memory>
#include <optional>
#include <string>

#include "rtslab/a2c.hpp"
#include "rtslab/env.hpp"

namespace rtslab {

// Uniform over legal_commands(state); absent (NOOP) when nothing is legal.
std::optional<Command> random_act(const GameState& state, Rng& rng);

// Shortest-path harvest/return cycling, one command per tick. Absent when no
// worker can make progress or no ticks remain.
std::optional<Command> scripted_optimal_act(const GameState& state, long remaining_ticks);

// Samples every categorical head. Throws std::invalid_argument when the
// observation does not match the networks' mode or input width.
EnvAction policy_act(const a2c::Networks& nets, const Observation& obs, Rng& rng);

class Agent {
public:
    virtual ~Agent() = default;
    virtual std::string name() const = 0;
    // Baselines read the raw game state; learned agents only see observations.
    virtual bool reads_state() const = 0;
    virtual EnvAction act(const Env& env, Rng& rng) = 0;
};

class NoopAgent final : public Agent {
public:
    std::string name() const override { return "noop"; }
    bool reads_state() const override { return false; }
    EnvAction act(const Env& env, Rng& rng) override;
};

class RandomAgent final : public Agent {
public:
    std::string name() const override { return "random"; }
    bool reads_state() const override { return true; }
    EnvAction act(const Env& env, Rng& rng) override;
};

class ScriptedAgent final : public Agent {
public:
    std::string name() const override { return "scripted"; }
    bool reads_state() const override { return true; }
    EnvAction act(const Env& env, Rng& rng) override;
};

class PolicyAgent final : public Agent {
public:
    explicit PolicyAgent(a2c::Networks nets) : nets_(std::move(nets)) {}
    std::string name() const override { return "policy"; }
    bool reads_state() const override { return false; }
    EnvAction act(const Env& env, Rng& rng) override;
    const a2c::Networks& networks() const { return nets_; }

private:
    a2c::Networks nets_;
};

}  // namespace rtslab
