#pragma once
/**
 * @file
 * @brief Named benchmark scenarios and their JSON file format. The built-in
 *  suite covers rearrangement grids, navigation among movable obstacles,
 *  nonmonotonic stay-put problems, clutter retrieval, and a cooking domain
 *  with symbolic clean/cook state.
 */

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ffplan/driver.hpp"

namespace ffplan {

struct Scenario {
    std::string name;
    std::string note;  // what makes this problem hard
    PPMProblem ppm;
    SamplingParams theta;  // calibrated sampling sizes for this world
};

// ---------------------------------------------------------------------------
// JSON serialization.

namespace detail {

using nlohmann::json;

inline json vec_j(Vec2 v) { return json::array({v.x, v.y}); }
inline Vec2 vec_p(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
inline json rect_j(const Rect& r) { return json::array({r.lo.x, r.lo.y, r.hi.x, r.hi.y}); }
inline Rect rect_p(const json& j) {
    return {{j.at(0).get<double>(), j.at(1).get<double>()},
            {j.at(2).get<double>(), j.at(3).get<double>()}};
}

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario& sc) {
    using nlohmann::json;
    using detail::rect_j;
    using detail::vec_j;
    const PPMProblem& p = sc.ppm;
    const World& w = p.world;

    json j;
    j["name"] = sc.name;
    if (!sc.note.empty()) j["note"] = sc.note;
    j["workspace"] = rect_j(w.workspace);
    j["robot"]["radius"] = w.robot_radius;
    j["robot"]["start"] = vec_j(p.robot_start);
    if (p.robot_goal) j["robot"]["goal"] = vec_j(*p.robot_goal);

    j["obstacles"] = json::array();
    for (const Obstacle& ob : w.obstacles) {
        json o;
        if (ob.shape.kind == Shape::Kind::Disc) {
            o["shape"] = {{"type", "disc"}, {"radius", ob.shape.radius}};
        } else {
            o["shape"] = {{"type", "rect"}, {"half", vec_j(ob.shape.half)}};
        }
        o["pose"] = vec_j(ob.pose.position);
        j["obstacles"].push_back(o);
    }

    j["objects"] = json::array();
    for (size_t i = 0; i < w.objects.size(); ++i) {
        const ObjectSpec& os = w.objects[i];
        json o;
        o["id"] = os.name;
        o["radius"] = os.radius;
        o["initial_pose"] = vec_j(os.initial.position);
        if (!os.grasp_dirs.empty()) {
            o["grasp_dirs"] = json::array();
            for (Vec2 d : os.grasp_dirs) o["grasp_dirs"].push_back(vec_j(d));
        }
        if (!os.placement_regions.empty()) {
            o["placement_regions"] = json::array();
            for (const Rect& r : os.placement_regions) o["placement_regions"].push_back(rect_j(r));
        }
        const ObjectGoal& g = p.goals[i];
        if (g.any()) {
            json gg;
            if (g.pose) gg["pose"] = vec_j(*g.pose);
            if (g.region) gg["region"] = rect_j(*g.region);
            if (g.held) gg["held"] = true;
            if (g.status)
                gg["status"] = *g.status == Value::Kind::Cooked ? "cooked" : "cleaned";
            o["goal"] = gg;
        }
        j["objects"].push_back(o);
    }

    if (!w.regions.empty()) {
        for (const auto& [name, r] : w.regions) j["regions"][name] = rect_j(r);
    }
    if (w.clean_region) j["symbolic"]["clean_region"] = rect_j(*w.clean_region);
    if (w.cook_region) j["symbolic"]["cook_region"] = rect_j(*w.cook_region);
    if (p.initial_held >= 0) {
        j["initial_held"] = w.objects[size_t(p.initial_held)].name;
        j["initial_grasp_dir"] = vec_j(p.initial_grasp_dir);
    }

    json t;
    t["poses_per_object"] = sc.theta.poses_per_object;
    t["poses_per_goal_region"] = sc.theta.poses_per_goal_region;
    t["grasps_per_object"] = sc.theta.grasps_per_object;
    t["roadmap_configs"] = sc.theta.roadmap_configs;
    t["prm_degree"] = sc.theta.prm_degree;
    t["star_roadmap"] = sc.theta.star_roadmap;
    j["sampling"] = t;
    return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    using detail::rect_p;
    using detail::vec_p;
    Scenario sc;
    sc.name = j.value("name", "unnamed");
    sc.note = j.value("note", "");
    PPMProblem& p = sc.ppm;
    World& w = p.world;

    w.workspace = rect_p(j.at("workspace"));
    w.robot_radius = j.at("robot").at("radius").get<double>();
    p.robot_start = vec_p(j.at("robot").at("start"));
    if (j.at("robot").contains("goal")) p.robot_goal = vec_p(j.at("robot").at("goal"));

    for (const auto& o : j.value("obstacles", nlohmann::json::array())) {
        Obstacle ob;
        const auto& sh = o.at("shape");
        std::string type = sh.at("type").get<std::string>();
        if (type == "disc") {
            ob.shape = Shape::disc(sh.at("radius").get<double>());
        } else if (type == "rect") {
            Vec2 h = vec_p(sh.at("half"));
            ob.shape = Shape::rect(h.x, h.y);
        } else {
            throw std::runtime_error("unknown obstacle shape type: " + type);
        }
        ob.pose = Pose{vec_p(o.at("pose"))};
        w.obstacles.push_back(ob);
    }

    for (const auto& o : j.at("objects")) {
        ObjectSpec os;
        os.name = o.at("id").get<std::string>();
        os.radius = o.at("radius").get<double>();
        os.initial = Pose{vec_p(o.at("initial_pose"))};
        for (const auto& d : o.value("grasp_dirs", nlohmann::json::array()))
            os.grasp_dirs.push_back(vec_p(d));
        for (const auto& r : o.value("placement_regions", nlohmann::json::array()))
            os.placement_regions.push_back(rect_p(r));
        w.objects.push_back(os);

        ObjectGoal g;
        if (o.contains("goal")) {
            const auto& gg = o.at("goal");
            if (gg.contains("pose")) g.pose = vec_p(gg.at("pose"));
            if (gg.contains("region")) g.region = rect_p(gg.at("region"));
            g.held = gg.value("held", false);
            if (gg.contains("status")) {
                std::string st = gg.at("status").get<std::string>();
                if (st == "cooked")
                    g.status = Value::Kind::Cooked;
                else if (st == "cleaned")
                    g.status = Value::Kind::Cleaned;
                else
                    throw std::runtime_error("unknown status goal: " + st);
            }
        }
        p.goals.push_back(g);
    }

    if (j.contains("regions"))
        for (const auto& [name, r] : j.at("regions").items()) w.regions[name] = rect_p(r);
    if (j.contains("symbolic")) {
        const auto& sy = j.at("symbolic");
        if (sy.contains("clean_region")) w.clean_region = rect_p(sy.at("clean_region"));
        if (sy.contains("cook_region")) w.cook_region = rect_p(sy.at("cook_region"));
    }
    if (j.contains("initial_held")) {
        p.initial_held = w.object_index(j.at("initial_held").get<std::string>());
        if (p.initial_held < 0) throw std::runtime_error("initial_held names unknown object");
        p.initial_grasp_dir = vec_p(j.at("initial_grasp_dir"));
    }

    if (j.contains("sampling")) {
        const auto& t = j.at("sampling");
        sc.theta.poses_per_object = t.value("poses_per_object", sc.theta.poses_per_object);
        sc.theta.poses_per_goal_region =
            t.value("poses_per_goal_region", sc.theta.poses_per_goal_region);
        sc.theta.grasps_per_object = t.value("grasps_per_object", sc.theta.grasps_per_object);
        sc.theta.roadmap_configs = t.value("roadmap_configs", sc.theta.roadmap_configs);
        sc.theta.prm_degree = t.value("prm_degree", sc.theta.prm_degree);
        sc.theta.star_roadmap = t.value("star_roadmap", sc.theta.star_roadmap);
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    nlohmann::json j;
    in >> j;
    return scenario_from_json(j);
}

inline void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << scenario_to_json(sc).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Legality audit: the initial state must itself be collision-free.

inline void audit_scenario(const Scenario& sc) {
    const World& w = sc.ppm.world;
    auto fail = [&](const std::string& what) {
        throw std::runtime_error("scenario " + sc.name + ": " + what);
    };
    if (w.workspace.empty()) fail("empty workspace");
    if (!config_free(sc.ppm.robot_start, w.robot_radius, w)) fail("robot start not free");
    if (sc.ppm.robot_goal && !config_free(*sc.ppm.robot_goal, w.robot_radius, w))
        fail("robot goal not free");
    if (sc.ppm.goals.size() != w.objects.size()) fail("goal list size mismatch");
    for (size_t i = 0; i < w.objects.size(); ++i) {
        const ObjectSpec& a = w.objects[i];
        if (int(i) == sc.ppm.initial_held) continue;
        if (!placement_free(a.initial.position, a.radius, w))
            fail("object " + a.name + " initially in collision with fixed geometry");
        for (size_t k = i + 1; k < w.objects.size(); ++k) {
            const ObjectSpec& b = w.objects[k];
            if (int(k) == sc.ppm.initial_held) continue;
            if ((a.initial.position - b.initial.position).norm() < a.radius + b.radius - 1e-12)
                fail("objects " + a.name + " and " + b.name + " initially overlap");
        }
        // The robot must not start inside an object.
        if (int(i) != sc.ppm.initial_held &&
            (a.initial.position - sc.ppm.robot_start).norm() < a.radius + w.robot_radius - 1e-12)
            fail("robot starts inside object " + a.name);
    }
}

// ---------------------------------------------------------------------------
// Built-in suite.

namespace detail {

inline ObjectSpec disc_obj(std::string name, double r, Vec2 at,
                           std::vector<Vec2> grasps = {}) {
    ObjectSpec o;
    o.name = std::move(name);
    o.radius = r;
    o.initial = Pose{at};
    o.grasp_dirs = std::move(grasps);
    return o;
}

/// Rearrangement grid: `n` discs in rows, every disc carries an explicit
/// free goal pose in the lower half of the table. One grasp direction.
inline Scenario rearrangement(const std::string& name, int n) {
    Scenario sc;
    sc.name = name;
    sc.note = "rearrangement grid: every disc has an explicit goal pose";
    PPMProblem& p = sc.ppm;
    p.world.workspace = {0, 0, 11, 10};
    p.world.robot_radius = 0.5;
    int per_row = (n + 1) / 2;
    for (int i = 0; i < n; ++i) {
        int row = i / per_row, col = i % per_row;
        Vec2 at{1.5 + col * (8.0 / std::max(1, per_row - 1)), 7.0 + row * 1.8};
        p.world.objects.push_back(
            detail::disc_obj("d" + std::to_string(i), 0.3, at, {{0, 1}}));
        ObjectGoal g;
        g.pose = Vec2{at.x, 2.0 + row * 1.6};
        p.goals.push_back(g);
    }
    p.robot_start = {5.5, 4.8};
    sc.theta.poses_per_object = 4;
    sc.theta.poses_per_goal_region = 0;
    sc.theta.grasps_per_object = 1;
    sc.theta.roadmap_configs = 25;
    return sc;
}

/// Navigation among movable obstacles: a full-height wall with two doorways,
/// each plugged by a column of movable pillars; the discs behind the wall
/// must come to a region near the start and the robot must return home.
inline Scenario namo(const std::string& name, int plugs1, int plugs2) {
    Scenario sc;
    sc.name = name;
    sc.note = "NAMO: doorways plugged by movable pillars, return-home config goal";
    PPMProblem& p = sc.ppm;
    p.world.workspace = {0, 0, 12, 12};
    p.world.robot_radius = 0.5;
    // Wall at x=7 with gaps y in [3,5] and [7,9].
    p.world.obstacles.push_back({Shape::rect(0.3, 1.5), Pose{7, 1.5}});
    p.world.obstacles.push_back({Shape::rect(0.3, 1.0), Pose{7, 6.0}});
    p.world.obstacles.push_back({Shape::rect(0.3, 1.5), Pose{7, 10.5}});

    auto add_plugs = [&](int count, double gap_y, const std::string& tag) {
        for (int i = 0; i < count; ++i) {
            double x = 7.0 + (count == 1 ? 0.0 : (i - (count - 1) / 2.0) * 1.1);
            p.world.objects.push_back(
                detail::disc_obj("plug_" + tag + std::to_string(i), 0.45, {x, gap_y}));
            p.goals.push_back({});  // free to go anywhere
        }
    };
    add_plugs(plugs1, 4.0, "a");
    add_plugs(plugs2, 8.0, "b");

    for (int t = 0; t < 2; ++t) {
        p.world.objects.push_back(
            detail::disc_obj(std::string("target") + char('0' + t), 0.35, {10.0, 4.0 + 4.0 * t}));
        ObjectGoal g;
        g.region = Rect{0.8, 0.8, 3.2, 3.2};
        p.goals.push_back(g);
    }
    p.robot_start = {2, 6};
    p.robot_goal = p.robot_start;
    sc.theta.poses_per_object = 4;
    sc.theta.poses_per_goal_region = 3;
    sc.theta.grasps_per_object = 4;
    sc.theta.roadmap_configs = 60;
    sc.theta.prm_degree = 6;
    return sc;
}

/// Nonmonotonic: green discs must relocate, but both their initial and goal
/// neighborhoods are walled in by discs whose goal is to stay where they are.
inline Scenario nonmonotonic(const std::string& name, int greens) {
    Scenario sc;
    sc.name = name;
    sc.note = "nonmonotonic: satisfied stay-put goals must be temporarily violated";
    PPMProblem& p = sc.ppm;
    p.world.workspace = {0, 0, 10, 10};
    p.world.robot_radius = 0.5;

    auto ring = [&](Vec2 c, int rows, const std::string& tag, bool stay_put) {
        // Blockers on the four axis sides of a vertical column of `rows`
        // cells centered at c with spacing 1.
        std::vector<Vec2> at;
        double lo = c.y - (rows - 1) / 2.0, hi = c.y + (rows - 1) / 2.0;
        for (int i = 0; i < rows; ++i) {
            at.push_back({c.x - 1.0, lo + i});
            at.push_back({c.x + 1.0, lo + i});
        }
        at.push_back({c.x, lo - 1.0});
        at.push_back({c.x, hi + 1.0});
        int k = 0;
        for (Vec2 v : at) {
            p.world.objects.push_back(
                detail::disc_obj("blk_" + tag + std::to_string(k++), 0.4, v));
            ObjectGoal g;
            if (stay_put) g.pose = v;
            p.goals.push_back(g);
        }
    };

    Vec2 src{3, 5}, dst{7, 5};
    ring(src, greens, "s", true);
    ring(dst, greens, "d", true);
    double lo = 5.0 - (greens - 1) / 2.0;
    for (int i = 0; i < greens; ++i) {
        p.world.objects.push_back(
            detail::disc_obj("green" + std::to_string(i), 0.4, {src.x, lo + i}));
        ObjectGoal g;
        g.pose = Vec2{dst.x, lo + i};
        p.goals.push_back(g);
    }
    p.robot_start = {5, 1.2};
    sc.theta.poses_per_object = 3;
    sc.theta.poses_per_goal_region = 0;
    sc.theta.grasps_per_object = 4;
    sc.theta.roadmap_configs = 40;
    return sc;
}

}  // namespace detail

inline std::vector<Scenario> builtin_scenarios() {
    std::vector<Scenario> out;

    {  // E0: single relocation, the hand-solvable smoke scenario.
        Scenario sc;
        sc.name = "E0";
        sc.note = "single disc, single relocation into a goal region";
        PPMProblem& p = sc.ppm;
        p.world.workspace = {0, 0, 10, 10};
        p.world.robot_radius = 0.5;
        p.world.objects.push_back(detail::disc_obj("a", 0.4, {2, 2}));
        ObjectGoal g;
        g.region = Rect{7, 7, 9, 9};
        p.goals.push_back(g);
        p.robot_start = {1, 1};
        p.robot_goal = p.robot_start;
        sc.theta.poses_per_object = 3;
        sc.theta.poses_per_goal_region = 3;
        sc.theta.grasps_per_object = 2;
        sc.theta.roadmap_configs = 12;
        out.push_back(std::move(sc));
    }

    out.push_back(detail::rearrangement("R1", 8));
    out.push_back(detail::rearrangement("R2", 16));
    out.push_back(detail::namo("N1", 1, 2));
    out.push_back(detail::namo("N2", 2, 3));
    out.push_back(detail::nonmonotonic("M1", 1));
    out.push_back(detail::nonmonotonic("M2", 3));

    {  // C4: clutter ring around a single retrieval target.
        Scenario sc;
        sc.name = "C4";
        sc.note = "target ringed by clutter; goal is to be holding it back at the start";
        PPMProblem& p = sc.ppm;
        p.world.workspace = {0, 0, 10, 10};
        p.world.robot_radius = 0.5;
        Vec2 c{5, 5};
        p.world.objects.push_back(detail::disc_obj("target", 0.35, c));
        {
            ObjectGoal g;
            g.held = true;
            p.goals.push_back(g);
        }
        int id = 0;
        auto ring = [&](double rad, int count, double phase) {
            for (int i = 0; i < count; ++i) {
                double a = phase + 2 * M_PI * i / count;
                p.world.objects.push_back(detail::disc_obj(
                    "c" + std::to_string(id++), 0.35, c + Vec2{rad * std::cos(a), rad * std::sin(a)}));
                p.goals.push_back({});
            }
        };
        ring(1.3, 8, 0.0);
        ring(2.3, 12, 0.26);
        p.robot_start = {1.2, 1.2};
        p.robot_goal = p.robot_start;
        sc.theta.poses_per_object = 2;
        sc.theta.poses_per_goal_region = 0;
        sc.theta.grasps_per_object = 2;
        sc.theta.roadmap_configs = 30;
        out.push_back(std::move(sc));
    }

    {  // K5: cooking with symbolic clean/cook state and a shelf blocker.
        Scenario sc;
        sc.name = "K5";
        sc.note = "clean-then-cook chain; turnip blocks the shelf and must be returned";
        PPMProblem& p = sc.ppm;
        p.world.workspace = {0, 0, 12, 10};
        p.world.robot_radius = 0.5;
        // Shelf: two side walls, open toward the floor; interior x in [4.5, 6.5].
        p.world.obstacles.push_back({Shape::rect(0.25, 1.25), Pose{4.25, 8.75}});
        p.world.obstacles.push_back({Shape::rect(0.25, 1.25), Pose{6.75, 8.75}});
        p.world.clean_region = Rect{0.8, 0.6, 3.0, 2.6};  // sink
        p.world.cook_region = Rect{9.0, 0.6, 11.2, 2.6};  // stove
        p.world.regions["sink"] = *p.world.clean_region;
        p.world.regions["stove"] = *p.world.cook_region;
        p.world.regions["plate"] = Rect{8.8, 3.4, 10.6, 5.0};

        p.world.objects.push_back(detail::disc_obj("cabbage", 0.35, {5.5, 9.4}));
        {
            ObjectGoal g;
            g.status = Value::Kind::Cooked;
            g.region = p.world.regions["plate"];
            p.goals.push_back(g);
        }
        p.world.objects.push_back(detail::disc_obj("turnip", 0.35, {5.5, 8.3}));
        {
            ObjectGoal g;
            g.pose = Vec2{5.5, 8.3};  // must come back
            p.goals.push_back(g);
        }
        for (int i = 0; i < 2; ++i) {
            p.world.objects.push_back(
                detail::disc_obj("cup" + std::to_string(i), 0.3, {1.5 + i * 1.4, 8.6}));
            ObjectGoal g;
            g.region = Rect{7.6, 6.2, 10.8, 8.0};  // table
            p.goals.push_back(g);
        }
        p.robot_start = {6, 4};
        sc.theta.poses_per_object = 4;
        sc.theta.poses_per_goal_region = 3;
        sc.theta.grasps_per_object = 4;
        sc.theta.roadmap_configs = 50;
        sc.theta.prm_degree = 6;
        out.push_back(std::move(sc));
    }

    return out;
}

inline std::optional<Scenario> builtin_scenario(const std::string& name) {
    for (Scenario& sc : builtin_scenarios())
        if (sc.name == name) return std::move(sc);
    return std::nullopt;
}

}  // namespace ffplan
