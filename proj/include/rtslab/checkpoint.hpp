#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "rtslab/a2c.hpp"
#include "rtslab/env.hpp"

namespace rtslab {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    EnvConfig env;
    a2c::Hyperparams hp;
    std::uint64_t seed = 1;
    long episode = 0;
    a2c::Networks nets;
    nn::AdamState opt;
};

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json hyperparams_to_json(const a2c::Hyperparams& hp);
// Unknown keys are rejected; missing keys keep their defaults.
a2c::Hyperparams hyperparams_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
// Accepts the exact path or the path without its ".json" suffix.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rtslab
