#include "smpred/environment.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

namespace smpred::sim {

namespace {

std::vector<Segment> boundary_walls(double size) {
    return {
        {{0.0, 0.0}, {size, 0.0}},
        {{size, 0.0}, {size, size}},
        {{size, size}, {0.0, size}},
        {{0.0, size}, {0.0, 0.0}},
    };
}

/// Coarse-grid flood fill over ~1-unit cells. A cell is blocked when any
/// interior wall touches its closed rectangle, which conservatively widens
/// each wall to its neighboring cells; layouts with >= 8 unit doorways are
/// unaffected.
void check_connectivity(double size, std::span<const Segment> interior) {
    const int n = std::max(1, static_cast<int>(std::ceil(size)));
    const double cell = size / n;
    std::vector<char> blocked(static_cast<std::size_t>(n) * n, 0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double x0 = i * cell, y0 = j * cell;
            for (const Segment& w : interior) {
                if (segment_intersects_rect(w, x0, y0, x0 + cell, y0 + cell)) {
                    blocked[static_cast<std::size_t>(j) * n + i] = 1;
                    break;
                }
            }
        }
    }

    std::size_t free_cells = 0, start = SIZE_MAX;
    for (std::size_t c = 0; c < blocked.size(); ++c) {
        if (!blocked[c]) {
            ++free_cells;
            if (start == SIZE_MAX) start = c;
        }
    }
    if (free_cells == 0) throw SimulationError("environment: walls cover all free space");

    std::vector<char> seen(blocked.size(), 0);
    std::deque<std::size_t> queue{start};
    seen[start] = 1;
    std::size_t reached = 0;
    while (!queue.empty()) {
        const std::size_t c = queue.front();
        queue.pop_front();
        ++reached;
        const int i = static_cast<int>(c % n), j = static_cast<int>(c / n);
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int ni = i + di[k], nj = j + dj[k];
            if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
            const std::size_t nc = static_cast<std::size_t>(nj) * n + ni;
            if (!blocked[nc] && !seen[nc]) {
                seen[nc] = 1;
                queue.push_back(nc);
            }
        }
    }
    if (reached != free_cells) {
        throw SimulationError("environment: wall configuration disconnects free space");
    }
}

}  // namespace

Environment Environment::custom(std::string name, double size, std::vector<Segment> interior) {
    if (size <= 0.0) throw SimulationError("environment: size must be positive");
    for (const Segment& w : interior) {
        for (Vec2 p : {w.a, w.b}) {
            if (p.x < 0.0 || p.x > size || p.y < 0.0 || p.y > size) {
                throw SimulationError("environment: wall endpoint outside the square");
            }
        }
    }
    check_connectivity(size, interior);

    Environment env;
    env.name_ = std::move(name);
    env.size_ = size;
    env.walls_ = boundary_walls(size);
    env.walls_.insert(env.walls_.end(), interior.begin(), interior.end());
    return env;
}

Environment Environment::square() { return custom("square", 50.0, {}); }

Environment Environment::rooms1() {
    return custom("rooms1", 50.0,
                  {
                      {{0.0, 25.0}, {30.0, 25.0}},  // horizontal
                      {{25.0, 0.0}, {25.0, 17.0}},  // vertical
                  });
}

Environment Environment::rooms2() {
    return custom("rooms2", 50.0,
                  {
                      {{0.0, 25.0}, {42.0, 25.0}},    // horizontal
                      {{12.5, 25.0}, {12.5, 42.0}},   // vertical
                      {{25.0, 8.0}, {25.0, 25.0}},    // vertical
                      {{37.5, 25.0}, {37.5, 42.0}},   // vertical
                  });
}

Environment Environment::from_layout(const std::string& layout) {
    std::string key = layout;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (key == "square") return square();
    if (key == "rooms1") return rooms1();
    if (key == "rooms2") return rooms2();
    throw SimulationError("environment: unknown layout '" + layout + "'");
}

Environment Environment::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SimulationError(std::string("environment config: not valid JSON: ") + e.what());
    }
    if (!j.contains("name") || !j.contains("size")) {
        throw SimulationError("environment config: missing 'name' or 'size'");
    }
    std::vector<Segment> interior;
    for (const auto& w : j.value("walls", nlohmann::json::array())) {
        if (!w.is_array() || w.size() != 4) {
            throw SimulationError("environment config: each wall must be [x1,y1,x2,y2]");
        }
        interior.push_back({{w[0].get<double>(), w[1].get<double>()},
                            {w[2].get<double>(), w[3].get<double>()}});
    }
    return custom(j["name"].get<std::string>(), j["size"].get<double>(), std::move(interior));
}

Environment Environment::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SimulationError("environment config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string Environment::to_json_text() const {
    nlohmann::json j;
    j["name"] = name_;
    j["size"] = size_;
    auto walls = nlohmann::json::array();
    for (const Segment& w : interior_walls()) {
        walls.push_back({w.a.x, w.a.y, w.b.x, w.b.y});
    }
    j["walls"] = walls;
    return j.dump(2) + "\n";
}

bool Environment::in_free_space(Vec2 p) const {
    if (p.x <= 0.0 || p.x >= size_ || p.y <= 0.0 || p.y >= size_) return false;
    for (const Segment& w : interior_walls()) {
        if (point_segment_distance(p, w) <= 1e-12) return false;
    }
    return true;
}

double Environment::distance_to_nearest_wall(Vec2 p) const {
    double d = std::numeric_limits<double>::infinity();
    for (const Segment& w : walls_) d = std::min(d, point_segment_distance(p, w));
    return d;
}

std::vector<Vec2> Environment::corners() const {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < walls_.size(); ++i) {
        for (std::size_t j = i + 1; j < walls_.size(); ++j) {
            const Vec2 d1 = walls_[i].b - walls_[i].a;
            const Vec2 d2 = walls_[j].b - walls_[j].a;
            const double perp = std::abs(d1.dot(d2)) / (d1.norm() * d2.norm());
            if (perp > 1e-9) continue;
            const auto p = segment_intersection(walls_[i], walls_[j]);
            if (!p) continue;
            const bool dup = std::any_of(out.begin(), out.end(), [&](Vec2 q) {
                return (q - *p).norm() < 1e-6;
            });
            if (!dup) out.push_back(*p);
        }
    }
    return out;
}

std::vector<Vec2> Environment::wall_end_points() const {
    std::vector<Vec2> out;
    const auto interior = interior_walls();
    for (std::size_t i = 0; i < interior.size(); ++i) {
        for (Vec2 p : {interior[i].a, interior[i].b}) {
            bool touches = false;
            for (std::size_t j = 0; j < walls_.size(); ++j) {
                if (&walls_[j] == &interior[i]) continue;
                if (point_segment_distance(p, walls_[j]) <= 1e-9) {
                    touches = true;
                    break;
                }
            }
            if (!touches) out.push_back(p);
        }
    }
    return out;
}

double ray_cast(const Environment& env, Vec2 origin, double angle, double max_range) {
    if (max_range <= 0.0) throw SimulationError("ray_cast: max_range must be positive");
    if (!env.in_free_space(origin)) {
        throw SimulationError("ray_cast: origin not in free space (simulator corruption)");
    }
    const Vec2 dir{std::cos(angle), std::sin(angle)};
    double nearest = max_range;
    for (const Segment& w : env.walls()) {
        if (const auto t = ray_segment_distance(origin, dir, w)) {
            nearest = std::min(nearest, *t);
        }
    }
    return nearest;
}

}  // namespace smpred::sim
