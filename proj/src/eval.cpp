#include "rtslab/eval.hpp"

#include <cstdio>
#include <stdexcept>

namespace rtslab {

MetricsRecord evaluate(Agent& agent, const EnvConfig& cfg, int episodes, std::uint64_t seed) {
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    Rng rng(seed);
    MetricsRecord rec;
    rec.episodes = episodes;
    Env env(cfg);
    for (int ep = 0; ep < episodes; ++ep) {
        env.reset();
        const long offset = static_cast<long>(ep) * cfg.episode_length;
        const int stock_before = env.state().stockpile(Player::Player1);
        while (!env.done()) {
            const StepResult res = env.step(agent.act(env, rng));
            rec.total_reward += res.reward;
            for (const auto& e : res.info.events) {
                const long t = offset + e.tick;
                if (e.kind == EventKind::HarvestComplete) {
                    if (!rec.t_first_harvest) rec.t_first_harvest = t;
                } else {
                    if (!rec.t_first_return) rec.t_first_return = t;
                    ++rec.r;
                }
            }
        }
        rec.stockpile_delta += env.state().stockpile(Player::Player1) - stock_before;
    }
    return rec;
}

AggregateRecord aggregate(std::span<const MetricsRecord> records) {
    if (records.empty()) throw std::invalid_argument("aggregate needs at least one record");
    AggregateRecord out;
    out.runs = records.size();
    double harvest_sum = 0.0;
    double return_sum = 0.0;
    int harvest_n = 0;
    int return_n = 0;
    for (const auto& r : records) {
        if (r.t_first_harvest) {
            harvest_sum += static_cast<double>(*r.t_first_harvest);
            ++harvest_n;
        } else {
            ++out.harvest_absent;
        }
        if (r.t_first_return) {
            return_sum += static_cast<double>(*r.t_first_return);
            ++return_n;
        } else {
            ++out.return_absent;
        }
        out.r += static_cast<double>(r.r);
    }
    out.r /= static_cast<double>(records.size());
    if (harvest_n > 0) out.t_first_harvest = harvest_sum / harvest_n;
    if (return_n > 0) out.t_first_return = return_sum / return_n;
    return out;
}

namespace {

std::string fmt_time(const std::optional<double>& t) {
    if (!t) return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", *t);
    return buf;
}

std::string fmt_fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string table_header() {
    return pad("agent", 16) + " | " + pad("map", 5) + " | " + pad("t_first_harvest", 15) +
           " | " + pad("t_first_return", 15) + " | r";
}

std::string table_row(const std::string& label, const std::string& map,
                      const AggregateRecord& rec) {
    return pad(label, 16) + " | " + pad(map, 5) + " | " + pad(fmt_time(rec.t_first_harvest), 15) +
           " | " + pad(fmt_time(rec.t_first_return), 15) + " | " + fmt_fixed(rec.r);
}

std::string csv_header() {
    return "agent,map,t_first_harvest,harvest_absent,t_first_return,return_absent,r,runs";
}

std::string csv_row(const std::string& label, const std::string& map, const AggregateRecord& rec) {
    return label + "," + map + "," + fmt_time(rec.t_first_harvest) + "," +
           std::to_string(rec.harvest_absent) + "," + fmt_time(rec.t_first_return) + "," +
           std::to_string(rec.return_absent) + "," + fmt_fixed(rec.r) + "," +
           std::to_string(rec.runs);
}

}  // namespace rtslab
