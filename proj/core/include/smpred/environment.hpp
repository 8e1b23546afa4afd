#pragma once

#include "smpred/geometry.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace smpred::sim {

class SimulationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A square world of side `size` bounded by four walls, plus interior walls.
/// Walls are zero-thickness segments; the agent is a point.
class Environment {
public:
    /// Canonical layouts (side 50): square has no interior walls, rooms1 adds
    /// one horizontal + one vertical wall, rooms2 one horizontal + three
    /// vertical walls. Every doorway gap is at least 8 units wide.
    static Environment from_layout(const std::string& layout);
    static Environment square();
    static Environment rooms1();
    static Environment rooms2();

    /// Build from an explicit interior wall list. Throws SimulationError if a
    /// wall endpoint leaves [0,size]^2 or the walls disconnect free space
    /// (coarse-grid flood fill).
    static Environment custom(std::string name, double size, std::vector<Segment> interior);

    /// JSON config: {"name": ..., "size": ..., "walls": [[x1,y1,x2,y2], ...]};
    /// boundary walls are implicit.
    static Environment from_json_text(const std::string& text);
    static Environment load(const std::string& path);
    std::string to_json_text() const;

    const std::string& name() const { return name_; }
    double size() const { return size_; }
    /// All walls, the four boundary segments first.
    const std::vector<Segment>& walls() const { return walls_; }
    std::span<const Segment> interior_walls() const {
        return {walls_.data() + 4, walls_.size() - 4};
    }

    /// Strictly inside the square and not on an interior wall.
    bool in_free_space(Vec2 p) const;
    /// Min distance to any wall, boundary included.
    double distance_to_nearest_wall(Vec2 p) const;

    /// Intersection points of perpendicular wall pairs (the 4 square corners,
    /// plus wall/wall and wall/boundary junctions).
    std::vector<Vec2> corners() const;
    /// Interior wall endpoints that touch no other wall (free "wall's ends").
    std::vector<Vec2> wall_end_points() const;

private:
    Environment() = default;

    std::string name_;
    double size_ = 0.0;
    std::vector<Segment> walls_;  // boundary first, then interior
};

/// Distance from `origin` along `angle` to the nearest wall, clipped to
/// max_range (max_range when nothing is hit). Throws SimulationError when the
/// origin is not in free space — that signals simulator corruption.
double ray_cast(const Environment& env, Vec2 origin, double angle, double max_range);

}  // namespace smpred::sim
