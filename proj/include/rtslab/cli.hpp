#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtslab/a2c.hpp"
#include "rtslab/agents.hpp"

namespace rtslab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

inline constexpr const char* kVersion = "rtslab 1.0.0";
inline constexpr const char* kOutEnvVar = "RTS_REP_LAB_OUT";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string map = "4x4";
    Mode mode = Mode::Global;
    int window = 1;
    a2c::Hyperparams hp;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::filesystem::path out = "runs";
    // random | scripted | noop | checkpoint:<path>
    std::string agent = "random";
    int episodes = 5;
    std::optional<std::filesystem::path> record;
    long every = 1;  // replay frame sampling

    // Resolved environment for this config (built-in name or map file).
    EnvConfig env_config() const;
};

// Canonical JSON form; config_from_json(config_to_json(c)) == c.
nlohmann::json config_to_json(const RunConfig& c);
// Unknown keys raise ConfigError.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& c);

std::vector<std::uint64_t> parse_seeds(const std::string& s);

// Run directory name for one seed, e.g. "4x4-local-w1-seed1".
std::string run_name(const RunConfig& c, std::uint64_t seed);

struct ResolvedAgent {
    std::unique_ptr<Agent> agent;
    EnvConfig env;
    std::string label;
};

// Checkpoint agents take their environment from the checkpoint; a mode that
// disagrees with an explicitly requested one raises ConfigError.
ResolvedAgent resolve_agent(const RunConfig& c, bool mode_explicit, bool map_explicit);

int cmd_train(const RunConfig& c, std::ostream& out);
int cmd_eval(const RunConfig& c, std::ostream& out, bool mode_explicit = false,
             bool map_explicit = false);
int cmd_replay(const RunConfig& c, std::ostream& out, bool mode_explicit = false,
               bool map_explicit = false);
int cmd_export(const RunConfig& c, std::ostream& out);

// ASCII board: '.' empty, 'R' resource, 'B' base, 'E' enemy base, 'W' worker,
// 'w' worker carrying a mineral.
std::string render_board(const GameState& state);

int run(int argc, char** argv);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rtslab::cli
