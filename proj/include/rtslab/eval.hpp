#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtslab/agents.hpp"
#include "rtslab/env.hpp"

namespace rtslab {

inline constexpr int kEvalEpisodes = 5;

struct MetricsRecord {
    // Ticks counted from the start of the evaluation across all episodes.
    std::optional<long> t_first_harvest;
    std::optional<long> t_first_return;
    long r = 0;                // minerals returned (ReturnComplete events)
    long stockpile_delta = 0;  // the same quantity measured on the engine stockpile
    double total_reward = 0.0;
    int episodes = 0;
};

// Runs `episodes` consecutive episodes with one sampler seeded by `seed`.
MetricsRecord evaluate(Agent& agent, const EnvConfig& cfg, int episodes = kEvalEpisodes,
                       std::uint64_t seed = 1);

struct AggregateRecord {
    std::optional<double> t_first_harvest;
    int harvest_absent = 0;
    std::optional<double> t_first_return;
    int return_absent = 0;
    double r = 0.0;
    std::size_t runs = 0;
};

// Means over runs; absent first-event times are excluded from their mean and
// counted instead. Throws std::invalid_argument on empty input.
AggregateRecord aggregate(std::span<const MetricsRecord> records);

std::string table_header();
std::string table_row(const std::string& label, const std::string& map,
                      const AggregateRecord& rec);
std::string csv_header();
std::string csv_row(const std::string& label, const std::string& map, const AggregateRecord& rec);

}  // namespace rtslab
