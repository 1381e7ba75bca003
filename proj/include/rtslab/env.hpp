#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rtslab/engine.hpp"
#include "rtslab/maps.hpp"
#include "rtslab/repr.hpp"

namespace rtslab {

inline constexpr long kDefaultEpisodeLength = 2000;

struct EnvConfig {
    std::string map_name = "4x4";
    MapSpec map = builtin_map("4x4");
    Mode mode = Mode::Global;
    int window = 1;
    long episode_length = kDefaultEpisodeLength;
    std::uint64_t seed = 1;

    static EnvConfig for_map(const std::string& name_or_path, Mode mode, int window = 1);
    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

// Baseline agents act on the engine directly; absent means NOOP.
struct RawCommand {
    std::optional<Command> command;
};

using EnvAction = std::variant<GlobalAction, LocalAction, RawCommand>;

struct StepInfo {
    long tick = 0;
    std::optional<int> focus_unit;  // focus for the next decision (local mode)
    std::vector<RewardEvent> events;
    std::optional<Command> command;  // command actually applied (after decoding)
};

struct StepResult {
    Observation obs;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
};

class EpisodeDone : public std::logic_error {
public:
    EpisodeDone() : std::logic_error("step called on a finished episode") {}
};

// One decision per tick. Copyable: a copy continues independently.
class Env {
public:
    explicit Env(EnvConfig cfg);

    const Observation& reset();
    StepResult step(const EnvAction& action);

    const EnvConfig& config() const { return cfg_; }
    const GameState& state() const { return state_; }
    const Observation& observation() const { return obs_; }
    std::optional<int> focus_unit() const;
    double episode_reward() const { return episode_reward_; }
    bool done() const { return state_.tick() >= cfg_.episode_length; }
    long tick() const { return state_.tick(); }

    // JSONL replay stream; pass nullptr to stop recording. Not owned.
    void set_recorder(std::ostream* out) { recorder_ = out; }

private:
    Observation encode() const;

    EnvConfig cfg_;
    GameState state_;
    Observation obs_;
    std::size_t decision_index_ = 0;
    double episode_reward_ = 0.0;
    std::ostream* recorder_ = nullptr;
};

}  // namespace rtslab
