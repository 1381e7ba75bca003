#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "rtslab/agents.hpp"
#include "rtslab/env.hpp"

using namespace rtslab;

namespace {

EnvConfig cfg(const std::string& map, Mode mode, long length = kDefaultEpisodeLength) {
    EnvConfig c = EnvConfig::for_map(map, mode);
    c.episode_length = length;
    return c;
}

RawCommand noop() { return RawCommand{std::nullopt}; }

}  // namespace

TEST(Env, ResetShapes) {
    Env g(cfg("4x4", Mode::Global));
    EXPECT_EQ(g.observation().shape, (ObsShape{5, 16, 7}));
    EXPECT_EQ(g.observation().data, encode_global(g.state()).data);
    EXPECT_FALSE(g.focus_unit().has_value());

    EnvConfig lc = cfg("8x8", Mode::Local);
    lc.window = 2;
    Env l(lc);
    EXPECT_EQ(l.observation().shape, (ObsShape{5, 25, 8}));
    EXPECT_EQ(l.focus_unit(), 2);
    EXPECT_EQ(l.observation().data, encode_local(l.state(), 2, 2).data);
}

TEST(Env, ResetRestoresInitialState) {
    Env env(cfg("4x4", Mode::Global));
    const std::string initial = env.state().serialize();
    const auto obs = env.observation().data;
    env.step(GlobalAction{1, 0, 2, 3});
    env.step(RawCommand{});
    env.reset();
    EXPECT_EQ(env.state().serialize(), initial);
    EXPECT_EQ(env.observation().data, obs);
    EXPECT_EQ(env.episode_reward(), 0.0);
}

TEST(Env, ConfigValidation) {
    EnvConfig c = cfg("4x4", Mode::Local);
    c.window = 0;
    EXPECT_THROW(Env{c}, std::invalid_argument);
    c = cfg("4x4", Mode::Global, 0);
    EXPECT_THROW(Env{c}, std::invalid_argument);
    EXPECT_THROW(EnvConfig::for_map("nope", Mode::Global), std::exception);
}

TEST(Env, HarvestPaysTenOnCompletionTick) {
    Env env(cfg("4x4", Mode::Global));
    StepResult r = env.step(GlobalAction{1, 0, 2, 3});  // worker 2 harvests the node on its left
    EXPECT_EQ(r.info.command, (Command{2, ActionType::Harvest, Direction::Left}));
    EXPECT_EQ(r.reward, 0.0);
    for (int t = 2; t < 10; ++t) EXPECT_EQ(env.step(noop()).reward, 0.0);
    r = env.step(noop());
    EXPECT_EQ(r.info.tick, 10);
    EXPECT_EQ(r.reward, 10.0);
    ASSERT_EQ(r.info.events.size(), 1u);
    EXPECT_EQ(r.info.events[0].kind, EventKind::HarvestComplete);
}

TEST(Env, InvalidActionIsNoopWithZeroReward) {
    Env a(cfg("4x4", Mode::Global));
    Env b(cfg("4x4", Mode::Global));
    const StepResult ra = a.step(GlobalAction{2, 2, 1, 0});  // empty cell
    const StepResult rb = b.step(noop());
    EXPECT_EQ(ra.reward, 0.0);
    EXPECT_FALSE(ra.info.command.has_value());
    EXPECT_EQ(a.state().serialize(), b.state().serialize());
    EXPECT_EQ(ra.obs.data, rb.obs.data);
}

TEST(Env, RawCommandsAreValidated) {
    Env env(cfg("4x4", Mode::Global));
    const StepResult r = env.step(RawCommand{Command{2, ActionType::Return, Direction::Down}});
    EXPECT_FALSE(r.info.command.has_value());
}

TEST(Env, AllNoopEpisodeEarnsNothing) {
    Env env(cfg("4x4", Mode::Global));
    while (!env.done()) ASSERT_EQ(env.step(noop()).reward, 0.0);
    EXPECT_EQ(env.tick(), 2000);
    EXPECT_EQ(env.episode_reward(), 0.0);
}

TEST(Env, OneHarvestReturnCycleEarnsTwenty) {
    Env env(cfg("4x4", Mode::Global, 40));
    env.step(GlobalAction{1, 0, 2, 3});
    while (env.tick() < 10) env.step(noop());
    env.step(GlobalAction{1, 0, 3, 2});  // return down into the base
    while (!env.done()) env.step(noop());
    EXPECT_EQ(env.episode_reward(), 20.0);
    EXPECT_EQ(env.state().stockpile(Player::Player1), 1);
}

TEST(Env, DoneExactlyAtEpisodeLength) {
    Env env(cfg("4x4", Mode::Local, 25));
    for (int t = 1; t <= 25; ++t) {
        const StepResult r = env.step(LocalAction{0, 0});
        EXPECT_EQ(r.done, t == 25);
    }
    EXPECT_TRUE(env.done());
    EXPECT_THROW(env.step(LocalAction{0, 0}), EpisodeDone);
}

TEST(Env, ModeMismatchThrows) {
    Env g(cfg("4x4", Mode::Global));
    EXPECT_THROW(g.step(LocalAction{0, 0}), std::invalid_argument);
    Env l(cfg("4x4", Mode::Local));
    EXPECT_THROW(l.step(GlobalAction{0, 0, 0, 0}), std::invalid_argument);
}

TEST(Env, FocusSequenceIgnoresActions) {
    Env a(cfg("4x4", Mode::Local, 60));
    Env b(cfg("4x4", Mode::Local, 60));
    Rng rng(5);
    std::vector<int> fa, fb;
    while (!a.done()) {
        fa.push_back(*a.focus_unit());
        fb.push_back(*b.focus_unit());
        a.step(LocalAction{static_cast<int>(rng.below(4)), static_cast<int>(rng.below(4))});
        b.step(LocalAction{0, 0});
    }
    EXPECT_EQ(fa, fb);
    for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_EQ(fa[i], i % 2 == 0 ? 2 : 3);
}

TEST(Env, RewardsAreMultiplesOfTenUpToTwenty) {
    Env env(cfg("4x4", Mode::Global));
    RandomAgent agent;
    Rng rng(8);
    while (!env.done()) {
        const double r = env.step(agent.act(env, rng)).reward;
        ASSERT_TRUE(r == 0.0 || r == 10.0 || r == 20.0) << r;
    }
    EXPECT_LE(env.episode_reward(), 4000.0);
}

// The scripted agent's event schedule: every one of its 200 harvests
// completes, and 199 of them are returned before the episode ends.
TEST(Env, ScriptedEpisodeRewardFollowsEventCount) {
    Env env(cfg("4x4", Mode::Global));
    ScriptedAgent agent;
    Rng rng(1);
    long harvests = 0, returns = 0;
    double summed = 0.0;
    while (!env.done()) {
        const StepResult r = env.step(agent.act(env, rng));
        summed += r.reward;
        for (const auto& e : r.info.events) {
            (e.kind == EventKind::HarvestComplete ? harvests : returns) += 1;
        }
    }
    EXPECT_EQ(harvests, 200);
    EXPECT_EQ(returns, 199);
    EXPECT_EQ(summed, 10.0 * static_cast<double>(harvests + returns));
    EXPECT_EQ(env.episode_reward(), 3990.0);
    EXPECT_LE(env.episode_reward(), 4000.0);
}

TEST(Env, BitExactDeterminism) {
    auto play = [] {
        Env env(cfg("6x6", Mode::Local, 300));
        Rng rng(99);
        std::vector<double> trace;
        while (!env.done()) {
            const StepResult r = env.step(LocalAction{static_cast<int>(rng.below(4)),
                                                      static_cast<int>(rng.below(4))});
            trace.push_back(r.reward);
            trace.insert(trace.end(), r.obs.data.begin(), r.obs.data.end());
        }
        return std::make_pair(trace, env.state().serialize());
    };
    EXPECT_EQ(play(), play());
}

TEST(Env, CopiesContinueIndependently) {
    Env a(cfg("4x4", Mode::Global));
    a.step(GlobalAction{1, 0, 2, 3});
    Env b = a;
    b.step(noop());
    EXPECT_EQ(a.tick(), 1);
    EXPECT_EQ(b.tick(), 2);
}

TEST(Env, RecorderWritesOneJsonLinePerStep) {
    Env env(cfg("4x4", Mode::Local, 12));
    std::ostringstream log;
    env.set_recorder(&log);
    env.step(LocalAction{2, 3});
    while (!env.done()) env.step(LocalAction{0, 0});
    env.set_recorder(nullptr);

    std::istringstream in(log.str());
    std::string line;
    std::vector<nlohmann::json> lines;
    while (std::getline(in, line)) lines.push_back(nlohmann::json::parse(line));
    ASSERT_EQ(lines.size(), 12u);
    EXPECT_EQ(lines[0]["tick"], 1);
    EXPECT_EQ(lines[0]["focus"], 2);
    EXPECT_EQ(lines[0]["action"]["kind"], "local");
    EXPECT_EQ(lines[0]["command"]["action"], "harvest");
    EXPECT_EQ(lines[1]["focus"], 3);
    EXPECT_EQ(lines[9]["reward"], 10.0);
    EXPECT_EQ(lines[9]["events"].size(), 1u);
    EXPECT_EQ(lines[11]["state"], env.state().serialize());
}
