#include "smpred/geometry.hpp"

#include <algorithm>

namespace smpred::sim {

double wrap_angle(double theta) {
    double w = std::remainder(theta, 2.0 * kPi);
    if (w <= -kPi) w = kPi;  // remainder can land exactly on -pi
    return w;
}

std::optional<double> ray_segment_distance(Vec2 origin, Vec2 dir, const Segment& s) {
    const Vec2 e = s.b - s.a;
    const double denom = dir.cross(e);
    if (std::abs(denom) < 1e-12) return std::nullopt;  // parallel-ray tolerance
    const Vec2 ao = s.a - origin;
    const double t = ao.cross(e) / denom;  // distance along the ray
    const double u = ao.cross(dir) / denom;  // position along the segment
    if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
}

double point_segment_distance(Vec2 p, const Segment& s) {
    const Vec2 e = s.b - s.a;
    const double len2 = e.dot(e);
    if (len2 == 0.0) return (p - s.a).norm();
    double u = (p - s.a).dot(e) / len2;
    u = std::clamp(u, 0.0, 1.0);
    return (p - (s.a + e * u)).norm();
}

bool segment_intersects_rect(const Segment& s, double x0, double y0, double x1, double y1) {
    const double dx = s.b.x - s.a.x;
    const double dy = s.b.y - s.a.y;
    double t0 = 0.0, t1 = 1.0;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {s.a.x - x0, x1 - s.a.x, s.a.y - y0, y1 - s.a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;  // parallel and outside this edge
        } else {
            const double r = q[i] / p[i];
            if (p[i] < 0.0) {
                if (r > t1) return false;
                t0 = std::max(t0, r);
            } else {
                if (r < t0) return false;
                t1 = std::min(t1, r);
            }
        }
    }
    return t0 <= t1;
}

std::optional<Vec2> segment_intersection(const Segment& s1, const Segment& s2, double tol) {
    const Vec2 d1 = s1.b - s1.a;
    const Vec2 d2 = s2.b - s2.a;
    const double denom = d1.cross(d2);
    const double scale = d1.norm() * d2.norm();
    if (std::abs(denom) <= 1e-12 * scale) return std::nullopt;
    const Vec2 r = s2.a - s1.a;
    const double u = r.cross(d2) / denom;
    const double v = r.cross(d1) / denom;
    if (u < -tol || u > 1.0 + tol || v < -tol || v > 1.0 + tol) return std::nullopt;
    return s1.a + d1 * u;
}

}  // namespace smpred::sim
