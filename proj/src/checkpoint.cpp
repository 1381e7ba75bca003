#include "rtslab/checkpoint.hpp"

#include <fstream>
#include <utility>

namespace rtslab {

using nlohmann::json;

json hyperparams_to_json(const a2c::Hyperparams& hp) {
    return {{"gamma", hp.gamma},
            {"beta", hp.beta},
            {"eta", hp.eta},
            {"omega", hp.omega},
            {"lr", hp.lr},
            {"total_steps", hp.total_steps},
            {"episode_length", hp.episode_length},
            {"hidden", hp.hidden},
            {"mean_loss", hp.mean_loss},
            {"checkpoint_every", hp.checkpoint_every}};
}

a2c::Hyperparams hyperparams_from_json(const json& j) {
    a2c::Hyperparams hp;
    for (const auto& [key, value] : j.items()) {
        if (key == "gamma") hp.gamma = value.get<double>();
        else if (key == "beta") hp.beta = value.get<double>();
        else if (key == "eta") hp.eta = value.get<double>();
        else if (key == "omega") hp.omega = value.get<double>();
        else if (key == "lr") hp.lr = value.get<double>();
        else if (key == "total_steps") hp.total_steps = value.get<long>();
        else if (key == "episode_length") hp.episode_length = value.get<long>();
        else if (key == "hidden") hp.hidden = value.get<std::size_t>();
        else if (key == "mean_loss") hp.mean_loss = value.get<bool>();
        else if (key == "checkpoint_every") hp.checkpoint_every = value.get<long>();
        else throw std::invalid_argument("unknown hyperparameter '" + key + "'");
    }
    return hp;
}

namespace {

json mlp_to_json(const nn::MlpParams& p) {
    json layers = json::array();
    for (const auto& l : p.layers) {
        layers.push_back({{"inputs", l.inputs()},
                          {"outputs", l.outputs()},
                          {"weight", std::vector<double>(l.weight.values().begin(),
                                                         l.weight.values().end())},
                          {"bias", std::vector<double>(l.bias.values().begin(),
                                                       l.bias.values().end())}});
    }
    return layers;
}

void fill(nn::Tensor& t, const json& values) {
    const auto v = values.get<std::vector<double>>();
    if (v.size() != t.size()) throw CheckpointError("parameter array has the wrong length");
    std::copy(v.begin(), v.end(), t.data());
}

nn::MlpParams mlp_from_json(const json& layers) {
    std::vector<std::size_t> sizes;
    for (const auto& l : layers) {
        if (sizes.empty()) sizes.push_back(l.at("inputs").get<std::size_t>());
        else if (sizes.back() != l.at("inputs").get<std::size_t>()) {
            throw CheckpointError("layer widths do not chain");
        }
        sizes.push_back(l.at("outputs").get<std::size_t>());
    }
    nn::MlpParams p = nn::MlpParams::zeros(sizes);
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
        fill(p.layers[i].weight, layers[i].at("weight"));
        fill(p.layers[i].bias, layers[i].at("bias"));
    }
    return p;
}

json tensors_to_json(const std::vector<nn::Tensor>& ts) {
    json out = json::array();
    for (const auto& t : ts) out.push_back(std::vector<double>(t.values().begin(), t.values().end()));
    return out;
}

}  // namespace

json checkpoint_to_json(const Checkpoint& c) {
    json j;
    j["format"] = "rtslab-checkpoint";
    j["version"] = kCheckpointVersion;
    j["seed"] = c.seed;
    j["episode"] = c.episode;
    j["env"] = {{"map_name", c.env.map_name},
                {"map", serialize_map(c.env.map)},
                {"mode", std::string(to_string(c.env.mode))},
                {"window", c.env.window},
                {"episode_length", c.env.episode_length}};
    j["hyperparams"] = hyperparams_to_json(c.hp);
    j["heads"] = c.nets.layout.sizes;
    j["policy"] = mlp_to_json(c.nets.policy);
    j["value"] = mlp_to_json(c.nets.value);
    j["optimizer"] = {{"lr", c.opt.lr},       {"beta1", c.opt.beta1}, {"beta2", c.opt.beta2},
                      {"eps", c.opt.eps},     {"step", c.opt.step},   {"m", tensors_to_json(c.opt.m)},
                      {"v", tensors_to_json(c.opt.v)}};
    return j;
}

Checkpoint checkpoint_from_json(const json& j) {
    try {
        if (j.at("format") != "rtslab-checkpoint") throw CheckpointError("not a checkpoint file");
        if (j.at("version").get<int>() != kCheckpointVersion) {
            throw CheckpointError("unsupported checkpoint version");
        }
        Checkpoint c;
        c.seed = j.at("seed").get<std::uint64_t>();
        c.episode = j.at("episode").get<long>();
        const json& e = j.at("env");
        c.env.map_name = e.at("map_name").get<std::string>();
        c.env.map = parse_map(e.at("map").get<std::string>());
        c.env.mode = parse_mode(e.at("mode").get<std::string>());
        c.env.window = e.at("window").get<int>();
        c.env.episode_length = e.at("episode_length").get<long>();
        c.env.seed = c.seed;
        c.hp = hyperparams_from_json(j.at("hyperparams"));

        c.nets.mode = c.env.mode;
        c.nets.layout.sizes = j.at("heads").get<std::vector<int>>();
        c.nets.policy = mlp_from_json(j.at("policy"));
        c.nets.value = mlp_from_json(j.at("value"));
        if (static_cast<std::size_t>(c.nets.layout.total()) != c.nets.policy.output_size()) {
            throw CheckpointError("head layout does not match policy output");
        }

        const json& o = j.at("optimizer");
        c.opt = nn::AdamState::for_params(std::as_const(c.nets).tensors(), o.at("lr").get<double>());
        c.opt.beta1 = o.at("beta1").get<double>();
        c.opt.beta2 = o.at("beta2").get<double>();
        c.opt.eps = o.at("eps").get<double>();
        c.opt.step = o.at("step").get<long>();
        const json& m = o.at("m");
        const json& v = o.at("v");
        if (m.size() != c.opt.m.size() || v.size() != c.opt.v.size()) {
            throw CheckpointError("optimizer state does not match parameters");
        }
        for (std::size_t i = 0; i < c.opt.m.size(); ++i) {
            fill(c.opt.m[i], m[i]);
            fill(c.opt.v[i], v[i]);
        }
        return c;
    } catch (const json::exception& ex) {
        throw CheckpointError(std::string("malformed checkpoint: ") + ex.what());
    } catch (const MapError& ex) {
        throw CheckpointError(std::string("malformed checkpoint map: ") + ex.what());
    }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw CheckpointError("cannot write " + path.string());
    out << checkpoint_to_json(ckpt).dump() << '\n';
    if (!out) throw CheckpointError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::filesystem::path p = path;
    if (!std::filesystem::exists(p)) p += ".json";
    std::ifstream in(p);
    if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw CheckpointError("cannot parse " + p.string() + ": " + ex.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace rtslab
