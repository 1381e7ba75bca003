#include "rtslab/maps.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace rtslab {

namespace {

// Layouts keep the resource/base cluster in the top-left corner; the base moves
// further from the resource node as the map grows.
constexpr std::string_view kMap4x4 =
    "resources=230\n"
    "RW..\n"
    "WB..\n"
    "....\n"
    "...E\n";

constexpr std::string_view kMap6x6 =
    "resources=230\n"
    "R.....\n"
    ".WW...\n"
    "..B...\n"
    "......\n"
    "......\n"
    ".....E\n";

constexpr std::string_view kMap8x8 =
    "resources=230\n"
    "R.......\n"
    ".W......\n"
    "..W.....\n"
    "........\n"
    "....B...\n"
    "........\n"
    "........\n"
    ".......E\n";

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

bool is_legend(char c) {
    return c == '.' || c == 'R' || c == 'B' || c == 'W' || c == 'E';
}

}  // namespace

MapError::MapError(const std::string& what, int row, int col)
    : std::runtime_error("map error at row " + std::to_string(row) + ", column " +
                         std::to_string(col) + ": " + what),
      row_(row),
      col_(col) {}

MapSpec parse_map(std::string_view text) {
    MapSpec spec;
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = trim(text.substr(start, end - start));
        if (!line.empty()) lines.push_back(line);
        start = end + 1;
    }

    std::size_t first = 0;
    if (!lines.empty() && lines[0].starts_with("resources=")) {
        std::string_view value = lines[0].substr(10);
        int n = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
        if (ec != std::errc{} || ptr != value.data() + value.size() || n < 1) {
            throw MapError("invalid resources header '" + std::string(lines[0]) + "'", 0, 0);
        }
        spec.node_resources = n;
        first = 1;
    }
    if (first == lines.size()) throw MapError("map has no rows", 0, 0);

    for (std::size_t i = first; i < lines.size(); ++i) {
        const int row = static_cast<int>(i - first);
        std::string_view line = lines[i];
        if (!spec.rows.empty() && line.size() != spec.rows.front().size()) {
            throw MapError("row length " + std::to_string(line.size()) + " differs from " +
                               std::to_string(spec.rows.front().size()),
                           row, static_cast<int>(std::min(line.size(), spec.rows.front().size())));
        }
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (!is_legend(line[c])) {
                throw MapError(std::string("unknown legend character '") + line[c] + "'", row,
                               static_cast<int>(c));
            }
        }
        spec.rows.emplace_back(line);
    }
    spec.height = static_cast<int>(spec.rows.size());
    spec.width = static_cast<int>(spec.rows.front().size());
    return spec;
}

std::string serialize_map(const MapSpec& spec) {
    std::ostringstream os;
    os << "resources=" << spec.node_resources << "\n";
    for (const auto& r : spec.rows) os << r << "\n";
    return os.str();
}

GameState MapSpec::instantiate() const {
    GameState state(width, height);
    int next_id = 1;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            Unit u;
            u.pos = {x, y};
            switch (rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)]) {
                case 'R':
                    u.kind = UnitType::Resource;
                    u.owner = Player::Neutral;
                    u.hp = kResourceHp;
                    u.resources = node_resources;
                    break;
                case 'B':
                    u.kind = UnitType::Base;
                    u.owner = Player::Player1;
                    u.hp = kBaseHp;
                    break;
                case 'E':
                    u.kind = UnitType::Base;
                    u.owner = Player::Player2;
                    u.hp = kBaseHp;
                    break;
                case 'W':
                    u.kind = UnitType::Worker;
                    u.owner = Player::Player1;
                    u.hp = kWorkerHp;
                    break;
                default:
                    continue;
            }
            u.id = next_id++;
            try {
                state.add_unit(u);
            } catch (const std::invalid_argument& e) {
                throw MapError(e.what(), y, x);
            }
        }
    }
    return state;
}

MapSpec builtin_map(std::string_view name) {
    if (name == "4x4") return parse_map(kMap4x4);
    if (name == "6x6") return parse_map(kMap6x6);
    if (name == "8x8") return parse_map(kMap8x8);
    throw std::invalid_argument("unknown built-in map '" + std::string(name) + "'");
}

std::vector<std::string> builtin_map_names() { return {"4x4", "6x6", "8x8"}; }

MapSpec load_map(const std::string& name_or_path) {
    for (const auto& n : builtin_map_names()) {
        if (n == name_or_path) return builtin_map(n);
    }
    std::ifstream in(name_or_path);
    if (!in) throw std::invalid_argument("unknown map '" + name_or_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_map(buf.str());
}

}  // namespace rtslab
