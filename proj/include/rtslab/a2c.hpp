#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtslab/env.hpp"
#include "rtslab/neural.hpp"

namespace rtslab::a2c {

struct Hyperparams {
    double gamma = 0.99;
    double beta = 0.25;   // value loss coefficient
    double eta = 0.01;    // entropy bonus coefficient
    double omega = 0.5;   // global gradient norm threshold
    double lr = 0.0007;
    long total_steps = 2'000'000;
    long episode_length = 2000;
    std::size_t hidden = 128;
    // Divide the episode loss by its length instead of summing.
    bool mean_loss = false;
    long checkpoint_every = 50;  // episodes; 0 disables periodic checkpoints

    long episodes() const { return total_steps / episode_length; }
    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

// Policy network (concatenated categorical heads) and a separate scalar
// value network.
struct Networks {
    Mode mode = Mode::Global;
    nn::HeadLayout layout;
    nn::MlpParams policy;
    nn::MlpParams value;

    std::vector<nn::Tensor*> tensors();
    std::vector<const nn::Tensor*> tensors() const;
};

// Output layer of the policy starts near zero so the initial heads are close
// to uniform.
inline constexpr double kPolicyOutputScale = 0.01;

Networks make_networks(const EnvConfig& cfg, std::size_t hidden, Rng& rng);

EnvAction to_env_action(Mode mode, std::span<const int> indices);

struct Trajectory {
    std::vector<std::vector<double>> observations;
    std::vector<std::vector<int>> actions;
    std::vector<double> rewards;
    std::vector<std::vector<double>> logits;

    std::size_t size() const { return rewards.size(); }
};

// Plays the env from its current state until done, sampling every head.
Trajectory rollout(Env& env, const Networks& nets, Rng& rng);

// G_t = r_t + gamma * G_{t+1}, G_{T-1} = r_{T-1}.
std::vector<double> compute_returns(std::span<const double> rewards, double gamma);

struct LossTerms {
    double policy_loss = 0.0;  // sum (or mean) of -A_t log pi(a_t|s_t)
    double value_loss = 0.0;   // sum (or mean) of 1/2 (G_t - v(s_t))^2, before beta
    double entropy = 0.0;      // mean per-step total entropy
    double total = 0.0;        // policy_loss + beta * value_loss - eta * entropy term
};

// Evaluates the episode loss and accumulates its gradients (advantages are
// constants). policy_grad / value_grad must have the networks' shapes.
LossTerms accumulate_gradients(const Networks& nets, const Trajectory& traj,
                               const Hyperparams& hp, nn::MlpParams& policy_grad,
                               nn::MlpParams& value_grad);

struct UpdateDiagnostics {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double grad_norm = 0.0;
    double episode_reward = 0.0;
};

class NonFiniteLoss : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One clipped optimizer step on both networks. Throws NonFiniteLoss without
// touching the parameters if the loss or gradients are not finite.
UpdateDiagnostics update(Networks& nets, nn::AdamState& opt, const Trajectory& traj,
                         const Hyperparams& hp);

struct EpisodeLog {
    long episode = 0;
    long total_steps = 0;
    double episode_reward = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double grad_norm = 0.0;
    double wall_ms = 0.0;
};

struct TrainingSnapshot {
    const EnvConfig& env;
    const Hyperparams& hp;
    std::uint64_t seed;
    long episode;
    const Networks& nets;
    const nn::AdamState& opt;
};

struct TrainCallbacks {
    std::function<void(const EpisodeLog&)> on_episode;
    // tag is "ep000050"-style, "final", or "diagnostic" before aborting.
    std::function<void(const TrainingSnapshot&, const std::string& tag)> on_checkpoint;
};

struct TrainResult {
    Networks nets;
    nn::AdamState opt;
    std::vector<EpisodeLog> log;
};

// rollout -> returns -> update, once per episode, deterministic per seed.
TrainResult train(const EnvConfig& cfg, const Hyperparams& hp, std::uint64_t seed,
                  const TrainCallbacks& callbacks = {});

}  // namespace rtslab::a2c
