#pragma once
/**
 * @file
 * @brief World description for pick-place-move problems: workspace, fixed
 *  obstacles, movable objects with placement regions and grasp directions,
 *  and the free-space predicates built on them.
 */

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ffplan/geom.hpp"

namespace ffplan {

struct Rect {
    Vec2 lo, hi;

    Rect() = default;
    Rect(Vec2 lo_, Vec2 hi_) : lo(lo_), hi(hi_) {}
    Rect(double x0, double y0, double x1, double y1) : lo(x0, y0), hi(x1, y1) {}

    bool contains(Vec2 p) const {
        return lo.x <= p.x && p.x <= hi.x && lo.y <= p.y && p.y <= hi.y;
    }
    Vec2 center() const { return {(lo.x + hi.x) / 2, (lo.y + hi.y) / 2}; }
    Vec2 half() const { return {(hi.x - lo.x) / 2, (hi.y - lo.y) / 2}; }
    Rect shrunk(double m) const { return {{lo.x + m, lo.y + m}, {hi.x - m, hi.y - m}}; }
    bool empty() const { return lo.x > hi.x || lo.y > hi.y; }
};

struct Obstacle {
    Shape shape;
    Pose pose;
};

/// A movable object: a disc with a set of legal placement regions and grasp
/// approach directions (unit vectors; the grasp offset is scaled by the sum
/// of the robot and object radii).
struct ObjectSpec {
    std::string name;
    double radius = 0.5;
    Pose initial;
    std::vector<Rect> placement_regions;
    std::vector<Vec2> grasp_dirs;  // defaulted by the sampler when empty
};

struct World {
    Rect workspace;
    double robot_radius = 0.5;
    std::vector<Obstacle> obstacles;
    std::vector<ObjectSpec> objects;
    std::map<std::string, Rect> regions;  // named symbolic regions
    std::optional<Rect> clean_region;
    std::optional<Rect> cook_region;

    int object_index(const std::string& name) const {
        for (size_t i = 0; i < objects.size(); ++i)
            if (objects[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

/// Membership test for the robot configuration space: the robot disc at `q`
/// stays inside the workspace and clear of all fixed obstacles. Free space is
/// closed: clearance exactly zero is free.
inline bool config_free(Vec2 q, double robot_radius, const World& w) {
    if (!w.workspace.shrunk(robot_radius).contains(q)) return false;
    Segment point{q, q};
    for (const auto& ob : w.obstacles)
        if (segment_shape_dist(point, ob.shape, ob.pose.position) < robot_radius - kContactTol)
            return false;
    return true;
}

/// A disc object of radius `r` placed at `p`: inside the workspace, clear of
/// fixed obstacles.
inline bool placement_free(Vec2 p, double r, const World& w) {
    if (!w.workspace.shrunk(r).contains(p)) return false;
    Segment point{p, p};
    for (const auto& ob : w.obstacles)
        if (segment_shape_dist(point, ob.shape, ob.pose.position) < r - kContactTol) return false;
    return true;
}

/// True iff the robot disc swept along `traj` stays inside the workspace and
/// clear of fixed obstacles (movable objects are not considered).
inline bool traj_free_fixed(const Segment& traj, double robot_radius, const World& w) {
    Rect inner = w.workspace.shrunk(robot_radius);
    if (!inner.contains(traj.a) || !inner.contains(traj.b)) return false;
    for (const auto& ob : w.obstacles)
        if (swept_disc_hits(traj, robot_radius, ob.shape, ob.pose.position)) return false;
    return true;
}

/// True iff the object held at `grasp.offset` from the robot, swept along
/// `traj`, collides with a fixed obstacle, leaves the workspace, or overlaps
/// the robot disc itself. Tangential robot/held contact does not count.
inline bool robot_grasp_c(const Segment& traj, double robot_radius,
                          const GraspTransform& grasp, const Shape& held, const World& w) {
    Segment carried{traj.a + grasp.offset, traj.b + grasp.offset};
    Rect inner = w.workspace.shrunk(held.radius);
    if (!inner.contains(carried.a) || !inner.contains(carried.b)) return true;
    for (const auto& ob : w.obstacles)
        if (swept_disc_hits(carried, held.radius, ob.shape, ob.pose.position)) return true;
    // Robot vs held object: the relative offset is constant along the edge.
    return grasp.offset.norm() < robot_radius + held.radius - kContactTol;
}

}  // namespace ffplan
