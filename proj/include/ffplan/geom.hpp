#pragma once
/**
 * @file
 * @brief 2D primitives and the swept-disc collision predicates used for
 *  roadmap edge validation. The robot is a translating disc, movable objects
 *  are discs, fixed obstacles are discs or axis-aligned rectangles.
 */

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>

namespace ffplan {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }

    Vec2 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
    }
};

/// Position of an object; orientation is omitted (discs, axis-aligned rects).
struct Pose {
    Vec2 position;

    Pose() = default;
    explicit Pose(Vec2 p) : position(p) {}
    Pose(double x, double y) : position(x, y) {}
};

/// Disc or axis-aligned rectangle. Dimensions are strictly positive.
struct Shape {
    enum class Kind : uint8_t { Disc, Rect };

    Kind kind = Kind::Disc;
    double radius = 0.0;  // Disc
    Vec2 half;            // Rect half-extents

    static Shape disc(double r) {
        assert(r > 0.0);
        Shape s;
        s.kind = Kind::Disc;
        s.radius = r;
        return s;
    }
    static Shape rect(double hx, double hy) {
        assert(hx > 0.0 && hy > 0.0);
        Shape s;
        s.kind = Kind::Rect;
        s.half = {hx, hy};
        return s;
    }
};

/// Straight-line edge trajectory. a == b is a degenerate (point) segment.
struct Segment {
    Vec2 a, b;

    Segment() = default;
    Segment(Vec2 a_, Vec2 b_) : a(a_), b(b_) {}

    double length() const { return (b - a).norm(); }
    Vec2 at(double t) const { return a + (b - a) * t; }
    Segment reversed() const { return {b, a}; }
};

/// Rigid offset from a robot configuration to the held object's position.
/// For a disc robot grasping a disc, |offset| = robot radius + object radius,
/// so robot/held contact is exactly tangential.
struct GraspTransform {
    Vec2 offset;

    GraspTransform() = default;
    explicit GraspTransform(Vec2 o) : offset(o) {}

    bool operator==(const GraspTransform& o) const { return offset == o.offset; }
};

// ---------------------------------------------------------------------------
// distance helpers

inline double point_segment_dist(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double dd = ab.norm_sq();
    if (dd == 0.0) return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / dd, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

inline double cross(Vec2 u, Vec2 v) { return u.x * v.y - u.y * v.x; }

inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    double d1 = cross(b - a, c - a);
    double d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c);
    double d4 = cross(d - c, b - c);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return true;
    auto on = [](Vec2 p, Vec2 q, Vec2 r) {  // r collinear with pq and within bbox
        return cross(q - p, r - p) == 0.0 && std::min(p.x, q.x) <= r.x &&
               r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
               r.y <= std::max(p.y, q.y);
    };
    return on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b);
}

inline double segment_segment_dist(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min(std::min(point_segment_dist(a, c, d), point_segment_dist(b, c, d)),
                    std::min(point_segment_dist(c, a, b), point_segment_dist(d, a, b)));
}

/// Distance from a point to a solid axis-aligned rectangle (0 inside).
inline double point_rect_dist(Vec2 p, Vec2 center, Vec2 half) {
    double dx = std::max(std::abs(p.x - center.x) - half.x, 0.0);
    double dy = std::max(std::abs(p.y - center.y) - half.y, 0.0);
    return std::hypot(dx, dy);
}

/// Distance from a segment to a solid axis-aligned rectangle (0 on overlap).
inline double segment_rect_dist(Vec2 a, Vec2 b, Vec2 center, Vec2 half) {
    // Endpoint inside the rectangle => overlap.
    if (point_rect_dist(a, center, half) == 0.0 || point_rect_dist(b, center, half) == 0.0)
        return 0.0;
    Vec2 c0{center.x - half.x, center.y - half.y};
    Vec2 c1{center.x + half.x, center.y - half.y};
    Vec2 c2{center.x + half.x, center.y + half.y};
    Vec2 c3{center.x - half.x, center.y + half.y};
    double d = segment_segment_dist(a, b, c0, c1);
    d = std::min(d, segment_segment_dist(a, b, c1, c2));
    d = std::min(d, segment_segment_dist(a, b, c2, c3));
    d = std::min(d, segment_segment_dist(a, b, c3, c0));
    return d;
}

/// Distance from a segment to a shape placed at `at`.
inline double segment_shape_dist(const Segment& seg, const Shape& sh, Vec2 at) {
    if (sh.kind == Shape::Kind::Disc)
        return std::max(point_segment_dist(at, seg.a, seg.b) - sh.radius, 0.0);
    return segment_rect_dist(seg.a, seg.b, at, sh.half);
}

// ---------------------------------------------------------------------------
// collision predicates
//
// Contact at exactly zero clearance is non-colliding (closed free space), so
// a grasp at offset = sum of radii does not register robot/held collision.
// Tangent contact arises by construction (grasp configurations touch the
// grasped object exactly), so the comparison carries a tolerance: rounding in
// the distance computation must never turn legal contact into a collision.

constexpr double kContactTol = 1e-9;

/// Disc of radius `r` swept along `seg` against a shape at `at`; strict overlap.
inline bool swept_disc_hits(const Segment& seg, double r, const Shape& sh, Vec2 at) {
    return segment_shape_dist(seg, sh, at) < r - kContactTol;
}

/// True iff the robot disc swept along `traj` collides with `obj` at `at`.
inline bool robot_obj_c(const Segment& traj, double robot_radius, const Shape& obj, Vec2 at) {
    return swept_disc_hits(traj, robot_radius, obj, at);
}

/// True iff the held object (carried at `grasp.offset` from the robot centre
/// along `traj`) collides with `obj` at `at`.
inline bool grasp_obj_c(const Segment& traj, const GraspTransform& grasp,
                        const Shape& held, const Shape& obj, Vec2 at) {
    assert(held.kind == Shape::Kind::Disc);
    Segment carried{traj.a + grasp.offset, traj.b + grasp.offset};
    return swept_disc_hits(carried, held.radius, obj, at);
}

}  // namespace ffplan
