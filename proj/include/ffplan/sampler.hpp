#pragma once
/**
 * @file
 * @brief Sampling-based discretization of pick-and-place problems: object
 *  pose tables, grasp tables, inverse kinematics for a translating disc
 *  robot, roadmap construction, and the translation into an EAS problem with
 *  Reachable / InReg tests. Tables only grow across sampling rounds so the
 *  collision caches keep their value.
 */

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ffplan/crg.hpp"
#include "ffplan/rng.hpp"

namespace ffplan {

struct SamplingParams {
    int poses_per_object = 25;     // general placements per object
    int poses_per_goal_region = 5; // extra placements inside each goal region
    int grasps_per_object = 4;     // side-grasp directions used
    int roadmap_configs = 50;      // extra PRM samples
    int prm_degree = 4;            // nearest-neighbour connections per vertex
    int rejection_factor = 30;     // sampling attempts per wanted sample
    int place_throttle = 5;        // Place successors per object per expansion
    double growth = 2.0;           // per-round multiplier on table sizes
    bool star_roadmap = false;     // spokes from the start config instead of PRM
    bool ik_jitter = false;        // extra randomly-oriented grasps per round

    SamplingParams scaled(double f) const {
        SamplingParams t = *this;
        t.poses_per_object = int(t.poses_per_object * f);
        t.poses_per_goal_region = int(t.poses_per_goal_region * f);
        t.roadmap_configs = int(t.roadmap_configs * f);
        return t;
    }
};

/// An object's goal in the continuous problem (at most one of pose/region;
/// held and status may combine with them).
struct ObjectGoal {
    std::optional<Vec2> pose;
    std::optional<Rect> region;
    bool held = false;
    std::optional<Value::Kind> status;  // Cleaned or Cooked

    bool any() const { return pose || region || held || status; }
};

struct PPMProblem {
    World world;
    Vec2 robot_start;
    std::optional<Vec2> robot_goal;
    int initial_held = -1;   // object index, or -1
    Vec2 initial_grasp_dir;  // unit direction when initially held
    std::vector<ObjectGoal> goals;  // indexed like world.objects
};

// ---------------------------------------------------------------------------

class Discretization {
public:
    explicit Discretization(const PPMProblem& ppm) : ppm_(&ppm) {
        crg.init(&ppm.world);
        const World& w = ppm.world;
        int m = int(w.objects.size());
        grasp_dirs_.resize(size_t(m));
        pose_counts_.assign(size_t(m), 0);
        goal_pose_counts_.assign(size_t(m), 0);
        q0_vertex = crg.roadmap.add_vertex(ppm.robot_start);
        targets_.push_back(q0_vertex);
        if (ppm.robot_goal) {
            goal_config_vertex = crg.roadmap.add_vertex(*ppm.robot_goal);
            targets_.push_back(goal_config_vertex);
        }
        register_tests();
    }

    Discretization(const Discretization&) = delete;

    /// One sampling round: grows pose/grasp/config tables to θ's sizes (and
    /// beyond them on later rounds via θ.growth applied by the caller),
    /// then rebuilds the EAS problem from the enlarged tables.
    void sample(const SamplingParams& theta, Rng& rng) {
        const World& w = ppm_->world;
        int m = int(w.objects.size());

        for (int o = 0; o < m; ++o) {
            sample_grasps(o, theta, rng);
            sample_poses(o, theta, rng);
        }
        sample_ik();  // pick/place triples + action configs
        sample_roadmap(theta, rng);
        build_problem();
    }

    /// Targets are the Move endpoints: start/goal configs and action configs.
    std::span<const int> targets() const { return targets_; }

    /// Goal conditions derived from the continuous goal specification.
    std::vector<const Condition*> convert_goal() {
        std::vector<const Condition*> out;
        if (ppm_->robot_goal)
            out.push_back(pool.simple(kVarRobot, Value::config(goal_config_vertex)));
        for (int o = 0; o < int(ppm_->goals.size()); ++o) {
            const ObjectGoal& g = ppm_->goals[size_t(o)];
            if (g.region) out.push_back(pool.in_region(o, *g.region));
            if (g.pose) out.push_back(pool.in_region(o, Rect{*g.pose, *g.pose}));
            if (g.held) {
                std::vector<Value> vals;
                for (int gi = 0; gi < int(crg.grasp_offsets[size_t(o)].size()); ++gi)
                    vals.push_back(Value::grasp(o, gi));
                out.push_back(pool.any_of(kVarHand, vals));
            }
            if (g.status) {
                Value v = *g.status == Value::Kind::Cooked ? Value::cooked() : Value::cleaned();
                out.push_back(pool.simple(var_status(o), v));
            }
        }
        return out;
    }

    const PPMProblem& ppm() const { return *ppm_; }

    // Built artifacts (valid after sample()).
    EASProblem problem;
    ConditionPool pool;
    CRG crg;
    TestContext tests;
    int q0_vertex = -1;
    int goal_config_vertex = -1;
    std::vector<std::vector<int>> actions_at_config;  // non-Move actions by config
    std::unordered_map<uint64_t, int> move_lookup;    // q * num_vertices + q2 -> action id

    struct PickPlace {  // one (object, pose, grasp) triple with valid IK
        int obj, pose, grasp, config, approach;  // approach < 0: none
    };
    const std::vector<PickPlace>& triples() const { return triples_; }

private:
    void register_tests() {
        tests.register_test(TestKind::Reachable,
                            [this](std::span<const Condition* const> conds,
                                   const RelaxedState& s_plus) {
                                ReachContext ctx(crg, /*track_achievers=*/true);
                                return ctx.query(conds, s_plus);
                            });
        tests.register_test(TestKind::InReg, [this](std::span<const Condition* const> conds,
                                                    const RelaxedState& s_plus) {
            std::vector<TestOutcome> out;
            for (const Condition* c : conds) {
                for (const Value& p : s_plus.values(var_pose(c->obj))) {
                    if (p.kind() != Value::Kind::PoseRef) continue;
                    if (c->region.contains(crg.pose_coord(c->obj, p.index()))) {
                        AchieverSet a;
                        a.add(var_pose(c->obj), p);
                        out.push_back({c, a});
                        break;
                    }
                }
            }
            return out;
        });
    }

    void sample_grasps(int o, const SamplingParams& theta, Rng& rng) {
        const ObjectSpec& spec = ppm_->world.objects[size_t(o)];
        auto& dirs = grasp_dirs_[size_t(o)];
        double len = ppm_->world.robot_radius + spec.radius;
        if (dirs.empty()) {
            // Held-object grasp first so the initial state can reference it.
            if (ppm_->initial_held == o) dirs.push_back(ppm_->initial_grasp_dir.normalized());
            std::vector<Vec2> base = spec.grasp_dirs;
            if (base.empty()) base = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (const Vec2& d : base) {
                if (int(dirs.size()) >= theta.grasps_per_object + (ppm_->initial_held == o ? 1 : 0))
                    break;
                Vec2 u = d.normalized();
                bool dup = false;
                for (const Vec2& e : dirs) dup |= (e - u).norm() < 1e-9;
                if (!dup) dirs.push_back(u);
            }
        }
        if (theta.ik_jitter) {
            double ang = rng.uniform(0, 6.283185307179586);
            dirs.push_back({std::cos(ang), std::sin(ang)});
        }
        auto& offsets = crg.grasp_offsets[size_t(o)];
        while (offsets.size() < dirs.size()) offsets.push_back(dirs[offsets.size()] * len);
    }

    void sample_poses(int o, const SamplingParams& theta, Rng& rng) {
        const World& w = ppm_->world;
        const ObjectSpec& spec = w.objects[size_t(o)];
        auto& table = crg.poses[size_t(o)];

        if (table.empty()) {
            // Pinned entries first: the initial pose and an explicit goal pose.
            if (ppm_->initial_held != o) table.push_back(spec.initial.position);
            const ObjectGoal& g = ppm_->goals[size_t(o)];
            if (g.pose) table.push_back(*g.pose);
        }

        const ObjectGoal& g = ppm_->goals[size_t(o)];
        if (g.region) {
            Rect r = g.region->shrunk(spec.radius);
            int want = theta.poses_per_goal_region;
            int budget = theta.rejection_factor * want;
            while (goal_pose_counts_[size_t(o)] < want && budget-- > 0) {
                Vec2 p = rng.in_rect(r);
                if (!placement_free(p, spec.radius, w)) continue;
                table.push_back(p);
                ++goal_pose_counts_[size_t(o)];
            }
        }

        if (g.status) {
            // A status goal requires placements inside the task regions the
            // Clean/Cook operators test for, otherwise those operators can
            // never fire.
            std::vector<Rect> task_regions;
            if (w.clean_region) task_regions.push_back(*w.clean_region);
            if (*g.status == Value::Kind::Cooked && w.cook_region)
                task_regions.push_back(*w.cook_region);
            for (const Rect& tr : task_regions) {
                Rect r = tr.shrunk(spec.radius);
                int want = theta.poses_per_goal_region;
                int budget = theta.rejection_factor * want;
                int& count = task_pose_counts_[task_key(o, tr)];
                while (count < want && budget-- > 0) {
                    Vec2 p = rng.in_rect(r);
                    if (!placement_free(p, spec.radius, w)) continue;
                    table.push_back(p);
                    ++count;
                }
            }
        }

        std::vector<Rect> regions = spec.placement_regions;
        if (regions.empty()) regions = {w.workspace};
        int want = theta.poses_per_object;
        int budget = theta.rejection_factor * want;
        while (pose_counts_[size_t(o)] < want && budget-- > 0) {
            const Rect& r0 = regions[size_t(rng.below(int(regions.size())))];
            Rect r = r0.shrunk(spec.radius);
            if (r.empty()) continue;
            Vec2 p = rng.in_rect(r);
            if (!placement_free(p, spec.radius, w)) continue;
            table.push_back(p);
            ++pose_counts_[size_t(o)];
        }
    }

    /// Inverse kinematics is unique for a translating disc: the robot centre
    /// sits at pose - grasp offset. Emits one config (plus a retreat
    /// "approach" config) per new (object, pose, grasp) triple.
    void sample_ik() {
        const World& w = ppm_->world;
        for (int o = 0; o < int(crg.poses.size()); ++o) {
            auto& table = crg.poses[size_t(o)];
            auto& offsets = crg.grasp_offsets[size_t(o)];
            for (int p = 0; p < int(table.size()); ++p) {
                for (int g = 0; g < int(offsets.size()); ++g) {
                    if (ik_done_.contains(triple_key(o, p, g))) continue;
                    ik_done_.insert(triple_key(o, p, g));
                    Vec2 q = table[size_t(p)] - offsets[size_t(g)];
                    if (!config_free(q, w.robot_radius, w)) continue;
                    int qi = crg.roadmap.add_vertex(q);
                    targets_.push_back(qi);
                    int ai = -1;
                    // Retreat straight back along the grasp direction.
                    Vec2 back = q - offsets[size_t(g)].normalized() * w.robot_radius;
                    Segment approach{back, q};
                    if (config_free(back, w.robot_radius, w) &&
                        traj_free_fixed(approach, w.robot_radius, w)) {
                        ai = crg.roadmap.add_vertex(back);
                        crg.roadmap.add_edge(ai, qi);
                    }
                    triples_.push_back({o, p, g, qi, ai});
                }
            }
        }
    }

    void sample_roadmap(const SamplingParams& theta, Rng& rng) {
        const World& w = ppm_->world;
        Roadmap& rm = crg.roadmap;

        if (theta.star_roadmap) {
            // Spokes from the start configuration to every newer vertex.
            for (int v = star_done_; v < rm.num_vertices(); ++v) {
                if (v == q0_vertex) continue;
                Segment s{rm.vertices[size_t(q0_vertex)], rm.vertices[size_t(v)]};
                if (traj_free_fixed(s, w.robot_radius, w)) rm.add_edge(q0_vertex, v);
            }
            star_done_ = rm.num_vertices();
        }

        int fresh_from = prm_done_;
        int budget = theta.rejection_factor * theta.roadmap_configs;
        while (prm_samples_ < theta.roadmap_configs && budget-- > 0) {
            Vec2 q = rng.in_rect(w.workspace.shrunk(w.robot_radius));
            if (!config_free(q, w.robot_radius, w)) continue;
            rm.add_vertex(q);
            ++prm_samples_;
        }

        // Connect every vertex not yet wired (action configs, approaches and
        // PRM samples alike) to its nearest bare-valid neighbours.
        for (int v = fresh_from; v < rm.num_vertices(); ++v) {
            std::vector<std::pair<double, int>> near;
            for (int u = 0; u < rm.num_vertices(); ++u) {
                if (u == v) continue;
                near.push_back({(rm.vertices[size_t(u)] - rm.vertices[size_t(v)]).norm_sq(), u});
            }
            std::sort(near.begin(), near.end());
            int made = 0;
            for (auto [d2, u] : near) {
                if (made >= theta.prm_degree) break;
                Segment s{rm.vertices[size_t(v)], rm.vertices[size_t(u)]};
                if (!traj_free_fixed(s, w.robot_radius, w)) continue;
                rm.add_edge(v, u);
                ++made;
            }
        }
        prm_done_ = rm.num_vertices();
        bridge_components();
    }

    /// Nearest-neighbour wiring alone leaves mutual-NN clusters (IK configs
    /// bunch around their pose) disconnected even in open space. Bridge:
    /// repeatedly try the shortest collision-free cross-component segments
    /// until no pair of components can be joined.
    void bridge_components() {
        const World& w = ppm_->world;
        Roadmap& rm = crg.roadmap;
        bool merged = true;
        while (merged) {
            merged = false;
            std::vector<int> comp = bare_components();
            std::vector<std::tuple<double, int, int>> cand;  // (dist², u, v)
            for (int u = 0; u < rm.num_vertices(); ++u)
                for (int v = u + 1; v < rm.num_vertices(); ++v)
                    if (comp[size_t(u)] != comp[size_t(v)])
                        cand.push_back(
                            {(rm.vertices[size_t(u)] - rm.vertices[size_t(v)]).norm_sq(), u, v});
            std::sort(cand.begin(), cand.end());
            for (auto [d2, u, v] : cand) {
                if (comp[size_t(u)] == comp[size_t(v)]) continue;  // joined meanwhile
                Segment s{rm.vertices[size_t(u)], rm.vertices[size_t(v)]};
                if (!traj_free_fixed(s, w.robot_radius, w)) continue;
                rm.add_edge(u, v);
                int from = comp[size_t(v)], to = comp[size_t(u)];
                for (int& c : comp)
                    if (c == from) c = to;
                merged = true;
            }
        }
    }

    uint64_t triple_key(int o, int p, int g) const {
        return (uint64_t(o) << 42) | (uint64_t(p) << 10) | uint64_t(g);
    }

    void build_problem() {
        const World& w = ppm_->world;
        int m = int(w.objects.size());
        problem = EASProblem{};
        problem.num_objects = m;

        // Domains with positional dense ids.
        problem.domains.resize(size_t(num_vars(m)));
        auto& dom = problem.domains;
        for (int q = 0; q < crg.roadmap.num_vertices(); ++q)
            dom[kVarRobot].push_back(Value::config(q));
        dom[kVarHand].push_back(Value::none());
        for (int o = 0; o < m; ++o)
            for (int g = 0; g < int(crg.grasp_offsets[size_t(o)].size()); ++g)
                dom[kVarHand].push_back(Value::grasp(o, g));
        for (int o = 0; o < m; ++o) {
            dom[var_pose(o)].push_back(Value::none());
            for (int p = 0; p < int(crg.poses[size_t(o)].size()); ++p)
                dom[var_pose(o)].push_back(Value::pose(o, p));
            dom[var_status(o)] = {Value::none(), Value::cleaned(), Value::cooked()};
        }

        // Initial state.
        problem.initial.vals.assign(size_t(num_vars(m)), Value::none());
        problem.initial.vals[kVarRobot] = Value::config(q0_vertex);
        if (ppm_->initial_held >= 0)
            problem.initial.vals[kVarHand] = Value::grasp(ppm_->initial_held, 0);
        for (int o = 0; o < m; ++o)
            if (o != ppm_->initial_held) problem.initial.vals[var_pose(o)] = Value::pose(o, 0);

        // Pick / Place (Place carries clearance disjunctions against every
        // other object so applying it keeps placements non-overlapping).
        actions_at_config.assign(size_t(crg.roadmap.num_vertices()), {});
        clearance_.clear();
        for (const PickPlace& t : triples_) {
            Value pv = Value::pose(t.obj, t.pose);
            Value gv = Value::grasp(t.obj, t.grasp);
            Value qv = Value::config(t.config);

            Action pick;
            pick.schema = Action::Schema::Pick;
            pick.obj = t.obj;
            pick.pose = t.pose;
            pick.grasp = t.grasp;
            pick.q = t.config;
            pick.conds = {pool.simple(kVarHand, Value::none()), pool.simple(var_pose(t.obj), pv),
                          pool.simple(kVarRobot, qv)};
            pick.add_effect(kVarHand, gv);
            pick.add_effect(var_pose(t.obj), Value::none());
            add_action(std::move(pick));

            Action place;
            place.schema = Action::Schema::Place;
            place.obj = t.obj;
            place.pose = t.pose;
            place.grasp = t.grasp;
            place.q = t.config;
            place.conds = {pool.simple(kVarHand, gv), pool.simple(kVarRobot, qv)};
            for (const Condition* c : clearance_conds(t.obj, t.pose)) place.conds.push_back(c);
            place.add_effect(kVarHand, Value::none());
            place.add_effect(var_pose(t.obj), pv);
            add_action(std::move(place));
        }

        // Clean / Cook.
        for (int o = 0; o < m && w.clean_region; ++o) {
            Action a;
            a.schema = Action::Schema::Clean;
            a.obj = o;
            a.conds = {pool.simple(var_status(o), Value::none()),
                       pool.in_region(o, *w.clean_region)};
            a.add_effect(var_status(o), Value::cleaned());
            add_action(std::move(a));
        }
        for (int o = 0; o < m && w.cook_region; ++o) {
            Action a;
            a.schema = Action::Schema::Cook;
            a.obj = o;
            a.conds = {pool.simple(var_status(o), Value::cleaned()),
                       pool.in_region(o, *w.cook_region)};
            a.add_effect(var_status(o), Value::cooked());
            add_action(std::move(a));
        }

        // Moves between targets that share a bare-roadmap component.
        move_lookup.clear();
        uint64_t nv = uint64_t(crg.roadmap.num_vertices());
        std::vector<int> comp = bare_components();
        for (int q : targets_) {
            for (int q2 : targets_) {
                if (q == q2 || comp[size_t(q)] != comp[size_t(q2)]) continue;
                Action mv;
                mv.schema = Action::Schema::Move;
                mv.q = q;
                mv.q2 = q2;
                mv.conds = {pool.simple(kVarRobot, Value::config(q)), pool.reachable(q, q2)};
                mv.add_effect(kVarRobot, Value::config(q2));
                mv.id = int(problem.actions.size());
                move_lookup.emplace(uint64_t(q) * nv + uint64_t(q2), mv.id);
                problem.actions.push_back(std::move(mv));
            }
        }

        problem.goal = convert_goal();
    }

    void add_action(Action&& a) {
        a.id = int(problem.actions.size());
        if (a.q >= 0)
            actions_at_config[size_t(a.q)].push_back(a.id);
        else
            symbolic_actions_.push_back(a.id);  // location-independent
        problem.actions.push_back(std::move(a));
    }

public:
    const std::vector<int>& symbolic_actions() const { return symbolic_actions_; }

private:
    /// Shared disjunctions [other is held] or [other sits at a compatible
    /// pose], one per (placing object, pose, other object).
    std::vector<const Condition*> clearance_conds(int o, int p) {
        uint64_t key = (uint64_t(o) << 32) | uint64_t(p);
        auto it = clearance_.find(key);
        if (it != clearance_.end()) return it->second;
        const World& w = ppm_->world;
        Vec2 at = crg.poses[size_t(o)][size_t(p)];
        std::vector<const Condition*> out;
        for (int o2 = 0; o2 < int(w.objects.size()); ++o2) {
            if (o2 == o) continue;
            double min_dist = w.objects[size_t(o)].radius + w.objects[size_t(o2)].radius;
            std::vector<Value> ok;
            ok.push_back(Value::none());
            for (int p2 = 0; p2 < int(crg.poses[size_t(o2)].size()); ++p2)
                if (!((crg.poses[size_t(o2)][size_t(p2)] - at).norm() < min_dist))
                    ok.push_back(Value::pose(o2, p2));
            out.push_back(pool.any_of(var_pose(o2), ok));
        }
        clearance_.emplace(key, out);
        return out;
    }

    std::vector<int> bare_components() const {
        const Roadmap& rm = crg.roadmap;
        std::vector<int> comp(size_t(rm.num_vertices()), -1);
        int next = 0;
        std::vector<int> stack;
        for (int v = 0; v < rm.num_vertices(); ++v) {
            if (comp[size_t(v)] >= 0) continue;
            comp[size_t(v)] = next;
            stack.push_back(v);
            while (!stack.empty()) {
                int u = stack.back();
                stack.pop_back();
                for (auto [e, x] : rm.adj[size_t(u)]) {
                    if (comp[size_t(x)] < 0) {
                        comp[size_t(x)] = next;
                        stack.push_back(x);
                    }
                }
            }
            ++next;
        }
        return comp;
    }

    const PPMProblem* ppm_;
    std::vector<std::vector<Vec2>> grasp_dirs_;
    std::vector<int> pose_counts_, goal_pose_counts_;
    std::map<std::pair<int, int>, int> task_pose_counts_;
    static std::pair<int, int> task_key(int o, const Rect& r) {
        return {o, int(r.lo.x * 8192) ^ int(r.hi.y * 8192)};
    }
    std::vector<PickPlace> triples_;
    std::unordered_set<uint64_t> ik_done_;
    std::unordered_map<uint64_t, std::vector<const Condition*>> clearance_;
    std::vector<int> targets_;
    std::vector<int> symbolic_actions_;
    int prm_samples_ = 0;
    int prm_done_ = 0;   // vertices already neighbour-connected
    int star_done_ = 0;  // vertices already spoke-connected
};

}  // namespace ffplan
