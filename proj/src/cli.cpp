#include "rtslab/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "rtslab/checkpoint.hpp"
#include "rtslab/eval.hpp"

namespace rtslab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

EnvConfig RunConfig::env_config() const {
    EnvConfig cfg;
    try {
        cfg = EnvConfig::for_map(map, mode, window);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const MapError& e) {
        throw ConfigError(e.what());
    }
    cfg.episode_length = hp.episode_length;
    if (!seeds.empty()) cfg.seed = seeds.front();
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

json config_to_json(const RunConfig& c) {
    json j = hyperparams_to_json(c.hp);
    j["command"] = c.command;
    j["map"] = c.map;
    j["mode"] = std::string(to_string(c.mode));
    j["w"] = c.window;
    j["seeds"] = c.seeds;
    j["out"] = c.out.string();
    j["agent"] = c.agent;
    j["episodes"] = c.episodes;
    j["record"] = c.record ? json(c.record->string()) : json(nullptr);
    j["every"] = c.every;
    return j;
}

RunConfig config_from_json(const json& j, RunConfig base) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c = std::move(base);
    json hp = hyperparams_to_json(c.hp);
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "command") c.command = value.get<std::string>();
            else if (key == "map") c.map = value.get<std::string>();
            else if (key == "mode") c.mode = parse_mode(value.get<std::string>());
            else if (key == "w") c.window = value.get<int>();
            else if (key == "seeds") c.seeds = value.get<std::vector<std::uint64_t>>();
            else if (key == "out") c.out = value.get<std::string>();
            else if (key == "agent") c.agent = value.get<std::string>();
            else if (key == "episodes") c.episodes = value.get<int>();
            else if (key == "record") {
                if (value.is_null()) c.record.reset();
                else c.record = value.get<std::string>();
            } else if (key == "every") c.every = value.get<long>();
            else if (hp.contains(key)) hp[key] = value;
            else throw ConfigError("unknown config key '" + key + "'");
        }
        c.hp = hyperparams_from_json(hp);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

std::string config_hash(const RunConfig& c) {
    const std::string text = config_to_json(c).dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("invalid seed '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("seed list is empty");
    return out;
}

std::string run_name(const RunConfig& c, std::uint64_t seed) {
    std::string map = fs::path(c.map).stem().string();
    std::string name = map + "-" + std::string(to_string(c.mode));
    if (c.mode == Mode::Local) name += "-w" + std::to_string(c.window);
    return name + "-seed" + std::to_string(seed);
}

std::string render_board(const GameState& state) {
    std::string out;
    for (int y = 0; y < state.height(); ++y) {
        for (int x = 0; x < state.width(); ++x) {
            const Unit* u = state.unit_at({x, y});
            char ch = '.';
            if (u) {
                switch (u->kind) {
                    case UnitType::Resource: ch = 'R'; break;
                    case UnitType::Base: ch = u->owner == Player::Player1 ? 'B' : 'E'; break;
                    case UnitType::Worker: ch = u->resources > 0 ? 'w' : 'W'; break;
                    default: ch = '?'; break;
                }
            }
            out += ch;
        }
        out += '\n';
    }
    return out;
}

namespace {

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
    if (!f) throw std::runtime_error("failed writing " + p.string());
}

json episode_json(const a2c::EpisodeLog& l) {
    return {{"episode", l.episode},         {"total_steps", l.total_steps},
            {"episode_reward", l.episode_reward}, {"policy_loss", l.policy_loss},
            {"value_loss", l.value_loss},   {"entropy", l.entropy},
            {"grad_norm", l.grad_norm},     {"wall_ms", l.wall_ms}};
}

std::string curve_line(const a2c::EpisodeLog& l) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%ld,%ld,%.17g,%.17g,%.17g,%.17g,%.17g\n", l.episode,
                  l.total_steps, l.episode_reward, l.policy_loss, l.value_loss, l.entropy,
                  l.grad_norm);
    return buf;
}

constexpr const char* kCurveHeader =
    "episode,total_steps,episode_reward,policy_loss,value_loss,entropy,grad_norm\n";

void train_one(const RunConfig& c, const EnvConfig& env, std::uint64_t seed, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream log(dir / "log.jsonl");
    std::ofstream curve(dir / "curve.csv");
    if (!log || !curve) throw std::runtime_error("cannot open logs in " + dir.string());
    curve << kCurveHeader;

    RunConfig echo = c;
    echo.seeds = {seed};
    json manifest = {{"version", kVersion},
                     {"checkpoint_version", kCheckpointVersion},
                     {"config", config_to_json(echo)},
                     {"config_hash", config_hash(echo)},
                     {"seed", seed},
                     {"log", "log.jsonl"},
                     {"curve", "curve.csv"},
                     {"final_checkpoint", "final.json"}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");

    a2c::TrainCallbacks cb;
    cb.on_episode = [&](const a2c::EpisodeLog& l) {
        log << episode_json(l).dump() << '\n';
        curve << curve_line(l);
        log.flush();
        curve.flush();
    };
    cb.on_checkpoint = [&](const a2c::TrainingSnapshot& s, const std::string& tag) {
        Checkpoint ckpt{s.env, s.hp, s.seed, s.episode, s.nets, s.opt};
        const fs::path p = tag == "final" || tag == "diagnostic"
                               ? dir / (tag + ".json")
                               : dir / "checkpoints" / (tag + ".json");
        save_checkpoint(ckpt, p);
    };
    a2c::train(env, c.hp, seed, cb);
}

}  // namespace

int cmd_train(const RunConfig& c, std::ostream& out) {
    try {
        c.hp.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const EnvConfig env = c.env_config();
    fs::create_directories(c.out);

    const std::size_t workers = std::max<std::size_t>(
        1, std::min<std::size_t>(c.seeds.size(), std::thread::hardware_concurrency()));
    std::mutex mu;
    std::vector<std::string> errors;
    std::size_t next = 0;
    auto worker = [&] {
        for (;;) {
            std::uint64_t seed;
            {
                std::lock_guard lock(mu);
                if (next >= c.seeds.size()) return;
                seed = c.seeds[next++];
            }
            const fs::path dir = c.out / run_name(c, seed);
            try {
                train_one(c, env, seed, dir);
                std::lock_guard lock(mu);
                out << "trained " << dir.string() << "\n";
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                errors.push_back("seed " + std::to_string(seed) + ": " + e.what());
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    }
    if (!errors.empty()) {
        for (const auto& e : errors) out << "error: " << e << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

ResolvedAgent resolve_agent(const RunConfig& c, bool mode_explicit, bool map_explicit) {
    ResolvedAgent r;
    std::string spec = c.agent;
    if (spec.starts_with("manifest:")) {
        const fs::path manifest_path = spec.substr(9);
        std::ifstream in(manifest_path);
        if (!in) throw ConfigError("cannot open manifest " + manifest_path.string());
        json m;
        try {
            in >> m;
            spec = "checkpoint:" +
                   (manifest_path.parent_path() / m.at("final_checkpoint").get<std::string>())
                       .string();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("malformed manifest: ") + e.what());
        }
    }
    if (spec.starts_with("checkpoint:")) {
        Checkpoint ckpt;
        try {
            ckpt = load_checkpoint(spec.substr(11));
        } catch (const CheckpointError& e) {
            throw ConfigError(e.what());
        }
        if (mode_explicit && ckpt.env.mode != c.mode) {
            throw ConfigError("checkpoint mode " + std::string(to_string(ckpt.env.mode)) +
                              " does not match --mode " + std::string(to_string(c.mode)));
        }
        if (map_explicit && ckpt.env.map != c.env_config().map) {
            throw ConfigError("checkpoint was trained on map " + ckpt.env.map_name);
        }
        r.env = ckpt.env;
        r.env.episode_length = c.hp.episode_length;
        r.label = ckpt.env.mode == Mode::Global
                      ? std::string("global")
                      : "local(w=" + std::to_string(ckpt.env.window) + ")";
        r.agent = std::make_unique<PolicyAgent>(std::move(ckpt.nets));
        return r;
    }
    r.env = c.env_config();
    if (spec == "random") r.agent = std::make_unique<RandomAgent>();
    else if (spec == "scripted") r.agent = std::make_unique<ScriptedAgent>();
    else if (spec == "noop") r.agent = std::make_unique<NoopAgent>();
    else throw ConfigError("unknown agent '" + spec + "'");
    r.label = r.agent->name();
    return r;
}

int cmd_eval(const RunConfig& c, std::ostream& out, bool mode_explicit, bool map_explicit) {
    if (c.episodes < 1) throw ConfigError("episodes must be >= 1");
    ResolvedAgent ra = resolve_agent(c, mode_explicit, map_explicit);
    std::vector<MetricsRecord> records;
    for (std::uint64_t seed : c.seeds) {
        EnvConfig env = ra.env;
        env.seed = seed;
        records.push_back(evaluate(*ra.agent, env, c.episodes, seed));
    }
    const AggregateRecord agg = aggregate(records);
    const std::string map = ra.env.map_name.empty() ? c.map : fs::path(ra.env.map_name).stem().string();
    out << table_header() << "\n" << table_row(ra.label, map, agg) << "\n";

    fs::create_directories(c.out);
    std::ostringstream csv;
    csv << csv_header() << "\n" << csv_row(ra.label, map, agg) << "\n";
    write_file(c.out / "eval.csv", csv.str());
    std::ostringstream per_seed;
    per_seed << "seed,t_first_harvest,t_first_return,r\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        per_seed << c.seeds[i] << ","
                 << (r.t_first_harvest ? std::to_string(*r.t_first_harvest) : "-") << ","
                 << (r.t_first_return ? std::to_string(*r.t_first_return) : "-") << "," << r.r
                 << "\n";
    }
    write_file(c.out / "eval_seeds.csv", per_seed.str());
    return kExitOk;
}

int cmd_replay(const RunConfig& c, std::ostream& out, bool mode_explicit, bool map_explicit) {
    if (c.every < 1) throw ConfigError("--every must be >= 1");
    ResolvedAgent ra = resolve_agent(c, mode_explicit, map_explicit);
    const std::uint64_t seed = c.seeds.empty() ? 1 : c.seeds.front();
    ra.env.seed = seed;
    Env env(ra.env);
    Rng rng(seed);

    std::ofstream replay;
    if (c.record) {
        if (c.record->has_parent_path()) fs::create_directories(c.record->parent_path());
        replay.open(*c.record);
        if (!replay) throw std::runtime_error("cannot write " + c.record->string());
        env.set_recorder(&replay);
    }
    out << "tick 0 stockpile 0\n" << render_board(env.state()) << "\n";
    while (!env.done()) {
        const StepResult r = env.step(ra.agent->act(env, rng));
        if (r.info.tick % c.every == 0 || r.done) {
            out << "tick " << r.info.tick << " stockpile "
                << env.state().stockpile(Player::Player1) << " reward " << r.reward;
            if (r.info.command) {
                out << " cmd " << r.info.command->unit_id << ":" << to_string(r.info.command->action)
                    << ":" << to_string(r.info.command->dir);
            }
            out << "\n" << render_board(env.state()) << "\n";
        }
    }
    out << "episode reward " << env.episode_reward() << "\n";
    return kExitOk;
}

int cmd_export(const RunConfig& c, std::ostream& out) {
    if (!fs::is_directory(c.out)) throw ConfigError("no run directory at " + c.out.string());
    // group -> episode -> rewards per seed
    std::map<std::string, std::map<long, std::vector<double>>> groups;
    std::ostringstream all;
    all << "group,seed,episode,total_steps,episode_reward\n";
    std::map<std::string, std::map<long, long>> steps;

    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(c.out)) {
        if (entry.is_directory() && fs::exists(entry.path() / "curve.csv")) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
        const std::string name = dir.filename().string();
        const auto pos = name.rfind("-seed");
        const std::string group = pos == std::string::npos ? name : name.substr(0, pos);
        const std::string seed = pos == std::string::npos ? "" : name.substr(pos + 5);
        std::ifstream in(dir / "curve.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::stringstream ls(line);
            std::string ep, ts, rew;
            std::getline(ls, ep, ',');
            std::getline(ls, ts, ',');
            std::getline(ls, rew, ',');
            const long e = std::stol(ep);
            groups[group][e].push_back(std::stod(rew));
            steps[group][e] = std::stol(ts);
            all << group << "," << seed << "," << ep << "," << ts << "," << rew << "\n";
        }
    }
    if (groups.empty()) throw ConfigError("no training runs found under " + c.out.string());

    std::ostringstream mean;
    mean << "group,episode,total_steps,mean_reward,runs\n";
    for (const auto& [group, eps] : groups) {
        for (const auto& [ep, rewards] : eps) {
            double s = 0.0;
            for (double r : rewards) s += r;
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6f", s / static_cast<double>(rewards.size()));
            mean << group << "," << ep << "," << steps[group][ep] << "," << buf << ","
                 << rewards.size() << "\n";
        }
    }
    write_file(c.out / "learning_curves.csv", all.str());
    write_file(c.out / "learning_curves_mean.csv", mean.str());
    out << "wrote " << (c.out / "learning_curves.csv").string() << " and "
        << (c.out / "learning_curves_mean.csv").string() << "\n";
    return kExitOk;
}

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Global vs. local representation lab for a harvest RTS microworld"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string config_file, map, mode, seeds, out_dir, agent, record;
    int window = 1, episodes = 5;
    long total_steps = 0, episode_length = 0, every = 1;
    double lr = 0, gamma = 0, beta = 0, eta = 0, omega = 0;

    struct Opts {
        CLI::Option *config, *map, *mode, *w, *seeds, *total_steps, *episode_length, *lr, *gamma,
            *beta, *eta, *omega, *out, *agent, *episodes, *record, *every;
    };
    std::map<std::string, Opts> opts;

    auto add_common = [&](CLI::App* sub) {
        Opts o{};
        o.config = sub->add_option("--config", config_file, "JSON config file (flags win)");
        o.map = sub->add_option("--map", map, "4x4 | 6x6 | 8x8 | path to a map file");
        o.mode = sub->add_option("--mode", mode, "global | local");
        o.w = sub->add_option("--w", window, "local window radius");
        o.seeds = sub->add_option("--seeds", seeds, "comma-separated seeds");
        o.total_steps = sub->add_option("--total-steps", total_steps);
        o.episode_length = sub->add_option("--episode-length", episode_length);
        o.lr = sub->add_option("--lr", lr);
        o.gamma = sub->add_option("--gamma", gamma);
        o.beta = sub->add_option("--beta", beta);
        o.eta = sub->add_option("--eta", eta);
        o.omega = sub->add_option("--omega", omega);
        o.out = sub->add_option("--out", out_dir, "output directory");
        o.agent = sub->add_option("--agent", agent,
                                  "random | scripted | noop | checkpoint:<path> | manifest:<path>");
        o.episodes = sub->add_option("--episodes", episodes, "evaluation episodes per seed");
        o.record = sub->add_option("--record", record, "replay JSONL output path");
        o.every = sub->add_option("--every", every, "render every Nth tick");
        opts[sub->get_name()] = o;
    };
    add_common(app.add_subcommand("train", "train A2C agents, one run directory per seed"));
    add_common(app.add_subcommand("eval", "evaluate an agent and print the metrics table"));
    add_common(app.add_subcommand("replay", "play one episode, write a replay and ASCII frames"));
    add_common(app.add_subcommand("export", "collect learning curves under --out into CSV"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const std::string command = sub->get_name();
        const Opts& o = opts.at(command);

        RunConfig c;
        if (const char* env_out = std::getenv(kOutEnvVar); env_out && *env_out) c.out = env_out;
        if (o.config->count()) {
            std::ifstream in(config_file);
            if (!in) throw ConfigError("cannot open config " + config_file);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw ConfigError(std::string("cannot parse config: ") + e.what());
            }
            c = config_from_json(j, c);
        }
        c.command = command;
        if (o.map->count()) c.map = map;
        if (o.mode->count()) {
            try {
                c.mode = parse_mode(mode);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        if (o.w->count()) c.window = window;
        if (o.seeds->count()) c.seeds = parse_seeds(seeds);
        if (o.total_steps->count()) c.hp.total_steps = total_steps;
        if (o.episode_length->count()) c.hp.episode_length = episode_length;
        if (o.lr->count()) c.hp.lr = lr;
        if (o.gamma->count()) c.hp.gamma = gamma;
        if (o.beta->count()) c.hp.beta = beta;
        if (o.eta->count()) c.hp.eta = eta;
        if (o.omega->count()) c.hp.omega = omega;
        if (o.out->count()) c.out = out_dir;
        if (o.agent->count()) c.agent = agent;
        if (o.episodes->count()) c.episodes = episodes;
        if (o.record->count()) c.record = record;
        if (o.every->count()) c.every = every;
        const bool mode_explicit = o.mode->count() > 0;
        const bool map_explicit = o.map->count() > 0;

        if (command == "train") return cmd_train(c, out);
        if (command == "eval") return cmd_eval(c, out, mode_explicit, map_explicit);
        if (command == "replay") return cmd_replay(c, out, mode_explicit, map_explicit);
        return cmd_export(c, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const MapError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace rtslab::cli
