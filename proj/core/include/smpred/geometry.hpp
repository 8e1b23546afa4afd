#pragma once

#include <cmath>
#include <optional>

namespace smpred::sim {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
};

/// One wall: a zero-thickness segment between two points.
struct Segment {
    Vec2 a;
    Vec2 b;
};

/// Wrap an angle to (-pi, pi].
double wrap_angle(double theta);

/// Distance along the ray (origin, unit direction) to the segment, if the ray
/// hits it. Exact parametric intersection; rays parallel to the segment
/// (|denominator| < 1e-12) never hit.
std::optional<double> ray_segment_distance(Vec2 origin, Vec2 dir, const Segment& s);

double point_segment_distance(Vec2 p, const Segment& s);

/// True when the segment touches the axis-aligned rectangle [x0,x1]x[y0,y1]
/// (Liang-Barsky clip; grazing an edge counts).
bool segment_intersects_rect(const Segment& s, double x0, double y0, double x1, double y1);

/// Intersection point of two segments, endpoints included (tolerance on the
/// segment parameters), or nullopt if they do not touch. Parallel pairs are
/// reported as non-intersecting.
std::optional<Vec2> segment_intersection(const Segment& s1, const Segment& s2, double tol = 1e-9);

}  // namespace smpred::sim
