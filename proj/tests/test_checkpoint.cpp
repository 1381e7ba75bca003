#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "rtslab/checkpoint.hpp"

using namespace rtslab;
namespace fs = std::filesystem;

namespace {

Checkpoint trained() {
    EnvConfig env = EnvConfig::for_map("6x6", Mode::Local, 2);
    a2c::Hyperparams hp;
    hp.episode_length = 100;
    hp.total_steps = 300;
    hp.hidden = 8;
    hp.eta = 0.02;
    hp.mean_loss = true;
    a2c::TrainResult r = a2c::train(env, hp, 42);
    env.episode_length = hp.episode_length;
    return Checkpoint{env, hp, 42, 3, std::move(r.nets), std::move(r.opt)};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(testing::TempDir()) / "rtslab_ckpt";
    fs::create_directories(dir);
    return dir / name;
}

void expect_same(const Checkpoint& a, const Checkpoint& b) {
    EXPECT_EQ(a.env.map, b.env.map);
    EXPECT_EQ(a.env.map_name, b.env.map_name);
    EXPECT_EQ(a.env.mode, b.env.mode);
    EXPECT_EQ(a.env.window, b.env.window);
    EXPECT_EQ(a.env.episode_length, b.env.episode_length);
    EXPECT_EQ(a.seed, b.seed);
    EXPECT_EQ(a.episode, b.episode);
    EXPECT_EQ(hyperparams_to_json(a.hp), hyperparams_to_json(b.hp));
    EXPECT_EQ(a.nets.layout, b.nets.layout);
    EXPECT_EQ(a.nets.policy, b.nets.policy);
    EXPECT_EQ(a.nets.value, b.nets.value);
    EXPECT_EQ(a.opt, b.opt);
}

}  // namespace

TEST(Checkpoint, JsonRoundTripIsExact) {
    const Checkpoint c = trained();
    expect_same(c, checkpoint_from_json(checkpoint_to_json(c)));
}

TEST(Checkpoint, FileRoundTripAndSuffixlessLoad) {
    const Checkpoint c = trained();
    const fs::path p = scratch("final.json");
    save_checkpoint(c, p);
    expect_same(c, load_checkpoint(p));
    expect_same(c, load_checkpoint(scratch("final")));
    EXPECT_THROW(load_checkpoint(scratch("missing")), CheckpointError);
}

TEST(Checkpoint, RejectsForeignOrFutureFiles) {
    nlohmann::json j = checkpoint_to_json(trained());
    nlohmann::json bad = j;
    bad["version"] = kCheckpointVersion + 1;
    EXPECT_THROW(checkpoint_from_json(bad), CheckpointError);
    bad = j;
    bad["format"] = "something-else";
    EXPECT_THROW(checkpoint_from_json(bad), CheckpointError);
    bad = j;
    bad.erase("policy");
    EXPECT_THROW(checkpoint_from_json(bad), CheckpointError);
    bad = j;
    bad["heads"] = {4, 4, 4};
    EXPECT_THROW(checkpoint_from_json(bad), CheckpointError);

    const fs::path p = scratch("garbage.json");
    std::ofstream(p) << "{not json";
    EXPECT_THROW(load_checkpoint(p), CheckpointError);
}

TEST(Checkpoint, RestoredPolicyActsIdentically) {
    const Checkpoint c = trained();
    const Checkpoint back = checkpoint_from_json(checkpoint_to_json(c));
    Env env(c.env);
    const auto a = nn::forward(c.nets.policy, env.observation().data).activations.back();
    const auto b = nn::forward(back.nets.policy, env.observation().data).activations.back();
    EXPECT_EQ(a, b);
}

TEST(Hyperparams, JsonRoundTripAndUnknownKeys) {
    a2c::Hyperparams hp;
    hp.gamma = 0.95;
    hp.lr = 1.234e-4;
    hp.checkpoint_every = 0;
    const auto back = hyperparams_from_json(hyperparams_to_json(hp));
    EXPECT_EQ(back.gamma, hp.gamma);
    EXPECT_EQ(back.lr, hp.lr);
    EXPECT_EQ(back.checkpoint_every, 0);
    EXPECT_THROW(hyperparams_from_json({{"gama", 0.9}}), std::invalid_argument);
    EXPECT_EQ(hyperparams_from_json({{"beta", 0.5}}).gamma, 0.99);
}
