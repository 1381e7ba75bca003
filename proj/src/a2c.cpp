#include "rtslab/a2c.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <utility>

namespace rtslab::a2c {

void Hyperparams::validate() const {
    if (!(gamma > 0.0) || !(omega > 0.0) || !(lr > 0.0)) {
        throw std::invalid_argument("gamma, omega and lr must be positive");
    }
    // Zero is allowed for ablations.
    if (!(beta >= 0.0) || !(eta >= 0.0)) {
        throw std::invalid_argument("beta and eta must be non-negative");
    }
    if (gamma > 1.0) throw std::invalid_argument("gamma must be <= 1");
    if (episode_length <= 0 || total_steps <= 0) {
        throw std::invalid_argument("total_steps and episode_length must be positive");
    }
    if (total_steps % episode_length != 0) {
        throw std::invalid_argument("total_steps must be divisible by episode_length");
    }
    if (hidden == 0) throw std::invalid_argument("hidden width must be positive");
    if (checkpoint_every < 0) throw std::invalid_argument("checkpoint_every must be >= 0");
}

std::vector<nn::Tensor*> Networks::tensors() {
    auto out = policy.tensors();
    for (auto* t : value.tensors()) out.push_back(t);
    return out;
}

std::vector<const nn::Tensor*> Networks::tensors() const {
    auto out = policy.tensors();
    for (const auto* t : value.tensors()) out.push_back(t);
    return out;
}

Networks make_networks(const EnvConfig& cfg, std::size_t hidden, Rng& rng) {
    Networks nets;
    nets.mode = cfg.mode;
    ObsShape shape;
    if (cfg.mode == Mode::Global) {
        shape = global_shape(cfg.map.width, cfg.map.height);
        nets.layout = nn::HeadLayout::global(cfg.map.width, cfg.map.height);
    } else {
        shape = local_shape(cfg.window);
        nets.layout = nn::HeadLayout::local();
    }
    const std::size_t in = shape.size();
    nets.policy = nn::MlpParams::init({in, hidden, static_cast<std::size_t>(nets.layout.total())},
                                      rng, kPolicyOutputScale);
    nets.value = nn::MlpParams::init({in, hidden, 1}, rng, 1.0);
    return nets;
}

EnvAction to_env_action(Mode mode, std::span<const int> indices) {
    if (mode == Mode::Global) {
        if (indices.size() != 4) throw std::invalid_argument("global action needs 4 indices");
        return GlobalAction{indices[0], indices[1], indices[2], indices[3]};
    }
    if (indices.size() != 2) throw std::invalid_argument("local action needs 2 indices");
    return LocalAction{indices[0], indices[1]};
}

Trajectory rollout(Env& env, const Networks& nets, Rng& rng) {
    if (env.config().mode != nets.mode) throw std::invalid_argument("network/env mode mismatch");
    Trajectory traj;
    const auto expected = static_cast<std::size_t>(env.config().episode_length - env.tick());
    traj.observations.reserve(expected);
    traj.actions.reserve(expected);
    traj.rewards.reserve(expected);
    traj.logits.reserve(expected);

    while (!env.done()) {
        const Observation& obs = env.observation();
        nn::MlpCache cache = nn::forward(nets.policy, obs.data);
        const auto heads = nn::head_distributions(cache.output(), nets.layout);
        std::vector<int> action = nn::sample_heads(heads, rng);

        traj.observations.push_back(obs.data);
        traj.logits.emplace_back(cache.output().begin(), cache.output().end());
        const StepResult r = env.step(to_env_action(nets.mode, action));
        traj.actions.push_back(std::move(action));
        traj.rewards.push_back(r.reward);
    }
    return traj;
}

std::vector<double> compute_returns(std::span<const double> rewards, double gamma) {
    std::vector<double> g(rewards.size());
    double running = 0.0;
    for (std::size_t t = rewards.size(); t-- > 0;) {
        running = rewards[t] + gamma * running;
        g[t] = running;
    }
    return g;
}

LossTerms accumulate_gradients(const Networks& nets, const Trajectory& traj,
                               const Hyperparams& hp, nn::MlpParams& policy_grad,
                               nn::MlpParams& value_grad) {
    const std::size_t n = traj.size();
    LossTerms terms;
    if (n == 0) return terms;
    const std::vector<double> returns = compute_returns(traj.rewards, hp.gamma);
    const double scale = hp.mean_loss ? 1.0 / static_cast<double>(n) : 1.0;

    double entropy_sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const auto& obs = traj.observations[t];
        const nn::MlpCache pc = nn::forward(nets.policy, obs);
        const nn::MlpCache vc = nn::forward(nets.value, obs);
        const double v = vc.output()[0];
        const double advantage = returns[t] - v;

        const auto heads = nn::head_distributions(pc.output(), nets.layout);
        const double log_prob = nn::joint_log_prob(heads, traj.actions[t]);
        const double entropy = nn::total_entropy(heads);

        terms.policy_loss += scale * (-advantage * log_prob);
        terms.value_loss += scale * 0.5 * advantage * advantage;
        entropy_sum += entropy;

        std::vector<double> dlogits =
            nn::policy_logit_grad(heads, traj.actions[t], advantage, hp.eta);
        for (auto& d : dlogits) d *= scale;
        nn::backward(nets.policy, pc, dlogits, policy_grad);

        const double dv = scale * hp.beta * (v - returns[t]);
        nn::backward(nets.value, vc, std::span<const double>(&dv, 1), value_grad);
    }
    terms.entropy = entropy_sum / static_cast<double>(n);
    terms.total = terms.policy_loss + hp.beta * terms.value_loss - hp.eta * scale * entropy_sum;
    return terms;
}

UpdateDiagnostics update(Networks& nets, nn::AdamState& opt, const Trajectory& traj,
                         const Hyperparams& hp) {
    nn::MlpParams pg = nn::MlpParams::zeros(nets.policy.sizes());
    nn::MlpParams vg = nn::MlpParams::zeros(nets.value.sizes());
    LossTerms terms;
    try {
        terms = accumulate_gradients(nets, traj, hp, pg, vg);
    } catch (const nn::NonFiniteError& e) {
        throw NonFiniteLoss(e.what());
    }
    if (!std::isfinite(terms.total) || !pg.all_finite() || !vg.all_finite()) {
        throw NonFiniteLoss("non-finite episode loss");
    }

    std::vector<nn::Tensor*> grads = pg.tensors();
    for (auto* t : vg.tensors()) grads.push_back(t);
    const nn::ClipReport clip = nn::clip_and_step(nets.tensors(), grads, opt, hp.omega);

    UpdateDiagnostics d;
    d.policy_loss = terms.policy_loss;
    d.value_loss = terms.value_loss;
    d.entropy = terms.entropy;
    d.grad_norm = clip.norm;
    for (double r : traj.rewards) d.episode_reward += r;
    return d;
}

namespace {

std::string episode_tag(long episode) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "ep%06ld", episode);
    return buf;
}

}  // namespace

TrainResult train(const EnvConfig& cfg, const Hyperparams& hp, std::uint64_t seed,
                  const TrainCallbacks& callbacks) {
    hp.validate();
    EnvConfig env_cfg = cfg;
    env_cfg.episode_length = hp.episode_length;
    env_cfg.seed = seed;
    env_cfg.validate();

    Rng init_rng(seed);
    Rng sample_rng(seed ^ 0x9e3779b97f4a7c15ULL);

    TrainResult result;
    result.nets = make_networks(env_cfg, hp.hidden, init_rng);
    result.opt = nn::AdamState::for_params(std::as_const(result.nets).tensors(), hp.lr);

    auto checkpoint = [&](long episode, const std::string& tag) {
        if (!callbacks.on_checkpoint) return;
        callbacks.on_checkpoint(
            TrainingSnapshot{env_cfg, hp, seed, episode, result.nets, result.opt}, tag);
    };

    Env env(env_cfg);
    const long episodes = hp.episodes();
    for (long ep = 1; ep <= episodes; ++ep) {
        const auto start = std::chrono::steady_clock::now();
        env.reset();
        const Trajectory traj = rollout(env, result.nets, sample_rng);

        UpdateDiagnostics diag;
        try {
            diag = update(result.nets, result.opt, traj, hp);
        } catch (const NonFiniteLoss&) {
            checkpoint(ep, "diagnostic");
            throw;
        }

        EpisodeLog log;
        log.episode = ep;
        log.total_steps = ep * hp.episode_length;
        log.episode_reward = diag.episode_reward;
        log.policy_loss = diag.policy_loss;
        log.value_loss = diag.value_loss;
        log.entropy = diag.entropy;
        log.grad_norm = diag.grad_norm;
        log.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        result.log.push_back(log);
        if (callbacks.on_episode) callbacks.on_episode(log);

        if (hp.checkpoint_every > 0 && ep % hp.checkpoint_every == 0 && ep != episodes) {
            checkpoint(ep, episode_tag(ep));
        }
    }
    checkpoint(episodes, "final");
    return result;
}

}  // namespace rtslab::a2c
