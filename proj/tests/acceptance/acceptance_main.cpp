// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "rtslab/cli.hpp"
#include "rtslab/eval.hpp"

using namespace rtslab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

Verdict fail(std::string why) { return {false, std::move(why)}; }

std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

// --- Encoding shapes ---

Verdict shapes() {
    const GameState s = builtin_map("4x4").instantiate();
    const ObsShape g = encode_global(s).shape;
    const ObsShape l = encode_local(s, rotation_next(s, 0), 1).shape;
    const std::string detail = "global " + std::to_string(g.planes) + "x" + std::to_string(g.cells) +
                               "x" + std::to_string(g.values) + ", local " +
                               std::to_string(l.planes) + "x" + std::to_string(l.cells) + "x" +
                               std::to_string(l.values);
    if (!(g == ObsShape{5, 16, 7}) || !(l == ObsShape{5, 9, 8})) return fail(detail);
    return {true, detail};
}

// --- One-hot invariant ---

bool one_hot(const Observation& obs) {
    for (int p = 0; p < obs.shape.planes; ++p) {
        for (int c = 0; c < obs.shape.cells; ++c) {
            double sum = 0.0;
            for (int v = 0; v < obs.shape.values; ++v) sum += obs.at(p, c, v);
            if (sum != 1.0) return false;
        }
    }
    return true;
}

Verdict one_hot_invariant() {
    std::size_t states = 0, encodings = 0;
    const auto names = builtin_map_names();
    const std::size_t per_map = 10000 / names.size() + 1;
    for (std::size_t m = 0; m < names.size(); ++m) {
        for (const auto& s : oracle::random_states(builtin_map(names[m]), per_map, 100 + m)) {
            ++states;
            ++encodings;
            if (!one_hot(encode_global(s))) return fail("global encoding at state " + std::to_string(states));
            for (int id : worker_ids(s)) {
                for (int w : {1, 2}) {
                    ++encodings;
                    if (!one_hot(encode_local(s, id, w))) {
                        return fail("local encoding at state " + std::to_string(states));
                    }
                }
            }
        }
    }
    return {states >= 10000, std::to_string(states) + " states, " + std::to_string(encodings) +
                                 " encodings"};
}

// --- Invalid actions behave as NOOP ---

bool same_step(const Env& env, const EnvAction& action) {
    Env a = env, b = env;
    const StepResult ra = a.step(action);
    const StepResult rb = b.step(RawCommand{});
    return a.state().serialize() == b.state().serialize() && ra.reward == rb.reward &&
           ra.obs.data == rb.obs.data;
}

Verdict invalid_is_noop() {
    long invalid = 0, checked = 0;
    for (Mode mode : {Mode::Global, Mode::Local}) {
        EnvConfig cfg = EnvConfig::for_map("4x4", mode);
        Env env(cfg);
        Rng rng(mode == Mode::Global ? 61 : 62);
        for (int sample = 0; sample < 100; ++sample) {
            // Advance a random number of random ticks to reach a fresh state.
            const int hops = 1 + static_cast<int>(rng.below(15));
            for (int h = 0; h < hops; ++h) {
                if (env.done()) env.reset();
                env.step(RawCommand{random_act(env.state(), rng)});
            }
            if (env.done()) env.reset();
            const GameState& s = env.state();
            for (int a = 0; a < 4; ++a) {
                for (int p = 0; p < 4; ++p) {
                    if (mode == Mode::Local) {
                        const Command raw{*env.focus_unit(), static_cast<ActionType>(a),
                                          static_cast<Direction>(p)};
                        ++checked;
                        if (!validate(s, raw)) {
                            ++invalid;
                            if (!same_step(env, LocalAction{a, p})) return fail("local index differs");
                        }
                        continue;
                    }
                    for (int x = 0; x < 4; ++x) {
                        for (int y = 0; y < 4; ++y) {
                            const Unit* u = s.unit_at({x, y});
                            const bool valid =
                                u && validate(s, Command{u->id, static_cast<ActionType>(a),
                                                         static_cast<Direction>(p)});
                            ++checked;
                            if (!valid) {
                                ++invalid;
                                if (!same_step(env, GlobalAction{x, y, a, p})) {
                                    return fail("global index differs");
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return {true, std::to_string(checked) + " indices, " + std::to_string(invalid) + " invalid"};
}

// --- Harvest ceiling ---

Verdict harvest_ceiling() {
    constexpr long kTicks = 2000;
    constexpr long kBound = 2 * kTicks / 20;
    constexpr long kOracleOptimum = 199;
    GameState s = builtin_map("4x4").instantiate();
    while (s.tick() < kTicks) s = apply_tick(s, scripted_optimal_act(s, kTicks - s.tick())).state;
    const long stock = s.stockpile(Player::Player1);
    const std::string detail = "stockpile " + std::to_string(stock) + ", oracle optimum " +
                               std::to_string(kOracleOptimum) + ", bound " + std::to_string(kBound);
    return {stock == kOracleOptimum && stock <= kBound, detail};
}

// --- Returns ---

Verdict returns_oracle() {
    Rng rng(2718);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> r(1 + rng.below(400));
        for (auto& v : r) v = 10.0 * static_cast<double>(rng.below(3));
        const double gamma = rng.uniform(0.0, 1.0);
        const auto fast = a2c::compute_returns(r, gamma);
        const auto slow = oracle::discounted_sums(r, gamma);
        for (std::size_t t = 0; t < r.size(); ++t) worst = std::max(worst, std::abs(fast[t] - slow[t]));
    }
    return {worst <= 1e-9, "1000 sequences, max error " + fmt("%.3g", worst)};
}

// --- Gradient check ---

Verdict gradient_check() {
    constexpr std::size_t kIn = 40, kHidden = 8, kSteps = 3;
    Rng rng(404);
    a2c::Networks nets;
    nets.mode = Mode::Global;
    nets.layout = nn::HeadLayout::global(2, 2);
    nets.policy = nn::MlpParams::init({kIn, kHidden, static_cast<std::size_t>(nets.layout.total())},
                                      rng, 1.0);
    nets.value = nn::MlpParams::init({kIn, kHidden, 1}, rng, 1.0);
    a2c::Trajectory traj;
    for (std::size_t t = 0; t < kSteps; ++t) {
        std::vector<double> x(kIn);
        for (auto& v : x) v = rng.uniform() < 0.3 ? 1.0 : 0.0;
        traj.observations.push_back(x);
        traj.actions.push_back({static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2)),
                                static_cast<int>(rng.below(4)), static_cast<int>(rng.below(4))});
        traj.rewards.push_back(10.0 * static_cast<double>(rng.below(3)));
    }
    a2c::Hyperparams hp;
    hp.eta = 0.05;

    nn::MlpParams pg = nn::MlpParams::zeros(nets.policy.sizes());
    nn::MlpParams vg = nn::MlpParams::zeros(nets.value.sizes());
    a2c::accumulate_gradients(nets, traj, hp, pg, vg);
    const auto adv = oracle::advantages(nets, traj, hp.gamma);

    std::vector<nn::Tensor*> params = nets.tensors();
    std::vector<nn::Tensor*> grads = pg.tensors();
    for (auto* t : vg.tensors()) grads.push_back(t);
    const double h = 1e-5;
    double worst = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        for (std::size_t i = 0; i < params[k]->size(); ++i) {
            const double orig = (*params[k])[i];
            (*params[k])[i] = orig + h;
            const double up = oracle::episode_loss(nets, traj, hp, adv);
            (*params[k])[i] = orig - h;
            const double down = oracle::episode_loss(nets, traj, hp, adv);
            (*params[k])[i] = orig;
            const double fd = (up - down) / (2 * h);
            const double an = (*grads[k])[i];
            const double denom = std::max(std::abs(fd) + std::abs(an), 1e-7);
            worst = std::max(worst, std::abs(fd - an) / denom);
            ++count;
        }
    }
    return {worst < 1e-4, std::to_string(count) + " parameters, max relative error " +
                              fmt("%.3g", worst)};
}

// --- Determinism ---

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict determinism(const fs::path& scratch) {
    std::vector<std::string> curves;
    for (const char* sub : {"a", "b"}) {
        const fs::path out = scratch / "determinism" / sub;
        fs::remove_all(out);
        std::vector<std::string> args{"rtslab", "train", "--map", "4x4", "--mode", "local",
                                      "--w", "1", "--seeds", "1", "--total-steps", "40000",
                                      "--episode-length", "2000", "--out", out.string()};
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        std::ostringstream o, e;
        if (cli::run(static_cast<int>(argv.size()), argv.data(), o, e) != 0) {
            return fail("train failed: " + e.str());
        }
        curves.push_back(slurp(out / "4x4-local-w1-seed1" / "curve.csv"));
    }
    std::size_t rows = 0;
    for (char ch : curves[0]) rows += ch == '\n';
    if (rows != 21) return fail("expected 20 episode rows, got " + std::to_string(rows - 1));
    return {curves[0] == curves[1], "20 episodes, curve.csv byte-identical: " +
                                        std::string(curves[0] == curves[1] ? "yes" : "no")};
}

// --- Directional learning result ---

double final10(const a2c::TrainResult& r) {
    double s = 0.0;
    const std::size_t n = r.log.size();
    for (std::size_t i = n - 10; i < n; ++i) s += r.log[i].episode_reward;
    return s / 10.0;
}

Verdict directional() {
    a2c::Hyperparams hp;
    hp.total_steps = 200'000;
    int wins = 0;
    std::vector<std::string> parts;
    for (std::uint64_t seed : {1, 2, 3}) {
        const double local = final10(a2c::train(EnvConfig::for_map("4x4", Mode::Local, 1), hp, seed));
        const double global = final10(a2c::train(EnvConfig::for_map("4x4", Mode::Global), hp, seed));
        RandomAgent random;
        const MetricsRecord m = evaluate(random, EnvConfig::for_map("4x4", Mode::Global), 5, seed);
        const double random_per_episode = m.total_reward / m.episodes;
        const bool win = local > global && local > 1.5 * random_per_episode;
        wins += win;
        parts.push_back("seed " + std::to_string(seed) + ": local " + fmt("%.1f", local) +
                        " global " + fmt("%.1f", global) + " 1.5x random " +
                        fmt("%.1f", 1.5 * random_per_episode) + (win ? " ok" : " miss"));
    }
    return {wins >= 2, std::to_string(wins) + "/3 seeds; " + join(parts, "; ")};
}

// --- RandomAI sanity ---

Verdict random_sanity() {
    bool ok = true;
    std::vector<std::string> parts;
    for (std::uint64_t seed : {1, 2, 3}) {
        RandomAgent random;
        const MetricsRecord m = evaluate(random, EnvConfig::for_map("4x4", Mode::Global), 5, seed);
        ok = ok && m.r >= 1 && m.r <= 80;
        parts.push_back("seed " + std::to_string(seed) + " r=" + std::to_string(m.r));
    }
    return {ok, join(parts)};
}

// --- Rotation ---

Verdict rotation() {
    Env env(EnvConfig::for_map("4x4", Mode::Local, 1));
    const std::vector<int> workers = worker_ids(env.state());
    if (workers.size() != 2) return fail("expected two workers");
    std::vector<int> seq;
    Rng rng(3);
    for (int i = 0; i < 6; ++i) {
        seq.push_back(*env.focus_unit());
        env.step(LocalAction{static_cast<int>(rng.below(4)), static_cast<int>(rng.below(4))});
    }
    const std::vector<int> want{workers[0], workers[1], workers[0],
                                workers[1], workers[0], workers[1]};
    std::vector<std::string> shown;
    for (int id : seq) shown.push_back(id == workers[0] ? "u1" : "u2");
    return {seq == want, join(shown, ",")};
}

}  // namespace

int main() {
    const fs::path scratch = fs::temp_directory_path() / "rtslab_acceptance";
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"encoding shapes", shapes},
        {"one-hot invariant", one_hot_invariant},
        {"invalid action equals NOOP", invalid_is_noop},
        {"harvest ceiling", harvest_ceiling},
        {"returns oracle", returns_oracle},
        {"gradient check", gradient_check},
        {"training determinism", [&] { return determinism(scratch); }},
        {"local beats global and random", directional},
        {"random agent sanity", random_sanity},
        {"focus rotation", rotation},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = fail(std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !v.pass;
        std::printf("%s  %-30s %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", name.c_str(),
                    v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
