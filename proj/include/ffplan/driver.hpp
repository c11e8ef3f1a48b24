#pragma once
/**
 * @file
 * @brief The outer planning loop: alternate sampling-based discretization
 *  with heuristic search over the resulting EAS problem, growing the sample
 *  tables geometrically whenever the discrete search fails, and validating
 *  candidate plans against fresh geometry before reporting them.
 */

#include <chrono>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "ffplan/sampler.hpp"
#include "ffplan/search.hpp"

namespace ffplan {

enum class Heuristic : uint8_t { H0, Goals, FF, MaxRob, AddRob, FFRob, FFRobHA };

inline const char* heuristic_name(Heuristic h) {
    switch (h) {
        case Heuristic::H0: return "h0";
        case Heuristic::Goals: return "goals";
        case Heuristic::FF: return "ff";
        case Heuristic::MaxRob: return "maxrob";
        case Heuristic::AddRob: return "addrob";
        case Heuristic::FFRob: return "ffrob";
        case Heuristic::FFRobHA: return "ffrob-ha";
    }
    return "?";
}

inline std::optional<Heuristic> heuristic_from_name(const std::string& s) {
    for (Heuristic h : {Heuristic::H0, Heuristic::Goals, Heuristic::FF, Heuristic::MaxRob,
                        Heuristic::AddRob, Heuristic::FFRob, Heuristic::FFRobHA})
        if (s == heuristic_name(h)) return h;
    return std::nullopt;
}

struct PlannerConfig {
    Heuristic heuristic = Heuristic::FFRobHA;
    Strategy strategy = Strategy::DBFS;
    double w = 0.8;
    SamplingParams theta;
    uint64_t seed = 0;
    int max_iterations = 4;        // sampling rounds
    long max_expansions = 50000;   // total across rounds; < 0: unbounded
    double max_seconds = -1;       // total wall budget; < 0: unbounded
};

/// One executed plan step; Moves carry the realized waypoint path. The
/// resolved coordinates are filled in during validation so that plan files
/// can report geometry without access to the discretization tables.
struct PlanStep {
    Action action;
    std::vector<Vec2> waypoints;
    Vec2 at{};         // robot configuration where the step executes (its end, for Moves)
    Vec2 target{};     // Move: destination; Pick/Place/Clean/Cook: object pose
    Vec2 grasp_dir{};  // Pick/Place: grasp offset γ (object pose − grasping config)
};

struct PlanReport {
    bool solved = false;
    bool out_of_budget = false;
    std::vector<PlanStep> steps;
    double plan_cost = 0;

    // Deterministic effort counters (no wall time: reports are compared
    // byte-for-byte across runs).
    int iterations = 0;
    long expansions = 0;
    long evaluations = 0;
    long generated = 0;
    long dead_ends = 0;
    long reopened = 0;
    long geometry_calls = 0;
    int roadmap_vertices = 0;
    int num_actions = 0;
};

// ---------------------------------------------------------------------------
// Plan validation against fresh geometry.

namespace detail {

struct SimState {
    Vec2 robot;
    int held = -1;   // object index
    int grasp = -1;  // grasp index of the held object
    std::vector<std::optional<Vec2>> obj;
    std::vector<Value> status;
};

inline bool sim_edge_free(const Discretization& disc, const SimState& sim, Vec2 a, Vec2 b) {
    const World& w = disc.ppm().world;
    Segment seg{a, b};
    if (!traj_free_fixed(seg, w.robot_radius, w)) return false;
    for (size_t o = 0; o < sim.obj.size(); ++o)
        if (sim.obj[o] &&
            robot_obj_c(seg, w.robot_radius, Shape::disc(w.objects[o].radius), *sim.obj[o]))
            return false;
    if (sim.held >= 0) {
        GraspTransform gt{disc.crg.grasp_offsets[size_t(sim.held)][size_t(sim.grasp)]};
        Shape held = Shape::disc(w.objects[size_t(sim.held)].radius);
        if (robot_grasp_c(seg, w.robot_radius, gt, held, w)) return false;
        for (size_t o = 0; o < sim.obj.size(); ++o)
            if (sim.obj[o] && grasp_obj_c(seg, gt, held, Shape::disc(w.objects[o].radius),
                                          *sim.obj[o]))
                return false;
    }
    return true;
}

/// Shortest valid roadmap path (by hop count) between two vertices under the
/// current placements and grasp, with every edge re-checked geometrically.
inline std::optional<std::vector<Vec2>> sim_move_path(const Discretization& disc,
                                                      const SimState& sim, int q, int q2) {
    const Roadmap& rm = disc.crg.roadmap;
    std::vector<int> prev(size_t(rm.num_vertices()), -2);
    std::deque<int> fifo{q};
    prev[size_t(q)] = -1;
    while (!fifo.empty() && prev[size_t(q2)] == -2) {
        int u = fifo.front();
        fifo.pop_front();
        for (auto [e, v] : rm.adj[size_t(u)]) {
            if (prev[size_t(v)] != -2) continue;
            if (!sim_edge_free(disc, sim, rm.vertices[size_t(u)], rm.vertices[size_t(v)]))
                continue;
            prev[size_t(v)] = u;
            fifo.push_back(v);
        }
    }
    if (prev[size_t(q2)] == -2) return std::nullopt;
    std::vector<Vec2> path;
    for (int v = q2; v != -1; v = prev[size_t(v)]) path.push_back(rm.vertices[size_t(v)]);
    std::reverse(path.begin(), path.end());
    return path;
}

constexpr double kSimTol = 1e-9;

inline bool near(Vec2 a, Vec2 b) { return (a - b).norm() < kSimTol; }

}  // namespace detail

/// Replays a discrete plan with direct geometry (no caches): Move steps are
/// realized as collision-checked roadmap paths, manipulation steps check the
/// kinematic and clearance constraints, and the continuous goal is verified
/// on the final simulated state. Returns the waypoint-annotated steps, or
/// nullopt if any step or the goal fails.
inline std::optional<std::vector<PlanStep>> validate_plan(const Discretization& disc,
                                                          const std::vector<const Action*>& plan) {
    const PPMProblem& ppm = disc.ppm();
    const World& w = ppm.world;
    int m = int(w.objects.size());

    detail::SimState sim;
    sim.robot = ppm.robot_start;
    sim.obj.resize(size_t(m));
    sim.status.assign(size_t(m), Value::none());
    for (int o = 0; o < m; ++o)
        if (o != ppm.initial_held) sim.obj[size_t(o)] = w.objects[size_t(o)].initial.position;
    if (ppm.initial_held >= 0) {
        sim.held = ppm.initial_held;
        sim.grasp = 0;
    }

    const Roadmap& rm = disc.crg.roadmap;
    std::vector<PlanStep> steps;
    for (const Action* a : plan) {
        PlanStep step{*a, {}};
        switch (a->schema) {
            case Action::Schema::Move: {
                if (!detail::near(sim.robot, rm.vertices[size_t(a->q)])) return std::nullopt;
                auto path = detail::sim_move_path(disc, sim, a->q, a->q2);
                if (!path) return std::nullopt;
                step.waypoints = std::move(*path);
                sim.robot = rm.vertices[size_t(a->q2)];
                step.at = step.target = sim.robot;
                break;
            }
            case Action::Schema::Pick: {
                if (sim.held >= 0) return std::nullopt;
                if (!detail::near(sim.robot, rm.vertices[size_t(a->q)])) return std::nullopt;
                if (!sim.obj[size_t(a->obj)]) return std::nullopt;
                if (!detail::near(*sim.obj[size_t(a->obj)], disc.crg.pose_coord(a->obj, a->pose)))
                    return std::nullopt;
                Vec2 off = disc.crg.grasp_offsets[size_t(a->obj)][size_t(a->grasp)];
                if (!detail::near(sim.robot + off, *sim.obj[size_t(a->obj)])) return std::nullopt;
                step.at = sim.robot;
                step.target = *sim.obj[size_t(a->obj)];
                step.grasp_dir = off;
                sim.held = a->obj;
                sim.grasp = a->grasp;
                sim.obj[size_t(a->obj)].reset();
                break;
            }
            case Action::Schema::Place: {
                if (sim.held != a->obj || sim.grasp != a->grasp) return std::nullopt;
                if (!detail::near(sim.robot, rm.vertices[size_t(a->q)])) return std::nullopt;
                Vec2 at = disc.crg.pose_coord(a->obj, a->pose);
                if (!placement_free(at, w.objects[size_t(a->obj)].radius, w)) return std::nullopt;
                for (int o = 0; o < m; ++o)
                    if (sim.obj[size_t(o)] &&
                        (*sim.obj[size_t(o)] - at).norm() + detail::kSimTol <
                            w.objects[size_t(o)].radius + w.objects[size_t(a->obj)].radius)
                        return std::nullopt;
                sim.obj[size_t(a->obj)] = at;
                step.at = sim.robot;
                step.target = at;
                step.grasp_dir = disc.crg.grasp_offsets[size_t(a->obj)][size_t(a->grasp)];
                sim.held = -1;
                sim.grasp = -1;
                break;
            }
            case Action::Schema::Clean: {
                if (!w.clean_region || !sim.obj[size_t(a->obj)]) return std::nullopt;
                if (!w.clean_region->contains(*sim.obj[size_t(a->obj)])) return std::nullopt;
                if (!(sim.status[size_t(a->obj)] == Value::none())) return std::nullopt;
                sim.status[size_t(a->obj)] = Value::cleaned();
                step.at = sim.robot;
                step.target = *sim.obj[size_t(a->obj)];
                break;
            }
            case Action::Schema::Cook: {
                if (!w.cook_region || !sim.obj[size_t(a->obj)]) return std::nullopt;
                if (!w.cook_region->contains(*sim.obj[size_t(a->obj)])) return std::nullopt;
                if (!(sim.status[size_t(a->obj)] == Value::cleaned())) return std::nullopt;
                sim.status[size_t(a->obj)] = Value::cooked();
                step.at = sim.robot;
                step.target = *sim.obj[size_t(a->obj)];
                break;
            }
            case Action::Schema::Custom:
                return std::nullopt;
        }
        steps.push_back(std::move(step));
    }

    if (ppm.robot_goal && !detail::near(sim.robot, *ppm.robot_goal)) return std::nullopt;
    for (int o = 0; o < int(ppm.goals.size()); ++o) {
        const ObjectGoal& g = ppm.goals[size_t(o)];
        if (g.pose && (!sim.obj[size_t(o)] || !detail::near(*sim.obj[size_t(o)], *g.pose)))
            return std::nullopt;
        if (g.region && (!sim.obj[size_t(o)] || !g.region->contains(*sim.obj[size_t(o)])))
            return std::nullopt;
        if (g.held && sim.held != o) return std::nullopt;
        if (g.status) {
            Value want =
                *g.status == Value::Kind::Cooked ? Value::cooked() : Value::cleaned();
            if (!(sim.status[size_t(o)] == want) &&
                !(*g.status == Value::Kind::Cleaned && sim.status[size_t(o)] == Value::cooked()))
                return std::nullopt;
        }
    }
    return steps;
}

// ---------------------------------------------------------------------------
// Successor generation.

/// Applicable actions at a state: manipulation actions indexed by the current
/// configuration, location-independent actions, and one Move per reachable
/// target. Place successors are throttled per object to keep the branching
/// factor bounded in clutter.
class SuccessorGen {
public:
    SuccessorGen(Discretization& disc, int place_throttle)
        : disc_(&disc), cache_(disc.crg), throttle_(place_throttle) {}

    void operator()(const State& s, std::vector<const Action*>& out) {
        const EASProblem& p = disc_->problem;
        const TestContext* tests = &disc_->tests;
        int q = s(kVarRobot).index();

        place_count_.assign(size_t(p.num_objects), 0);
        for (int id : disc_->actions_at_config[size_t(q)]) {
            const Action& a = p.actions[size_t(id)];
            if (a.schema == Action::Schema::Place) {
                if (throttle_ >= 0 && place_count_[size_t(a.obj)] >= throttle_) continue;
                if (!applicable(a, s, tests)) continue;
                ++place_count_[size_t(a.obj)];
            } else if (!applicable(a, s, tests)) {
                continue;
            }
            out.push_back(&a);
        }
        for (int id : disc_->symbolic_actions())
            if (applicable(p.actions[size_t(id)], s, tests))
                out.push_back(&p.actions[size_t(id)]);

        uint64_t nv = uint64_t(disc_->crg.roadmap.num_vertices());
        for (int t : cache_.reachable_targets(s, disc_->targets())) {
            if (t == q) continue;
            auto it = disc_->move_lookup.find(uint64_t(q) * nv + uint64_t(t));
            if (it != disc_->move_lookup.end()) out.push_back(&p.actions[size_t(it->second)]);
        }
    }

private:
    Discretization* disc_;
    ModeReachCache cache_;
    int throttle_;
    std::vector<int> place_count_;
};

// ---------------------------------------------------------------------------
// Outer loop.

inline PlanReport plan(const PPMProblem& ppm, const PlannerConfig& cfg) {
    PlanReport rep;
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    Discretization disc(ppm);
    Rng rng(cfg.seed);
    SamplingParams theta = cfg.theta;

    bool use_reach = cfg.heuristic == Heuristic::MaxRob || cfg.heuristic == Heuristic::AddRob ||
                     cfg.heuristic == Heuristic::FFRob || cfg.heuristic == Heuristic::FFRobHA;
    bool needs_relax = use_reach || cfg.heuristic == Heuristic::FF;

    long expansions_left = cfg.max_expansions;
    for (int round = 0; round < cfg.max_iterations; ++round) {
        if (cfg.max_seconds >= 0 && elapsed() >= cfg.max_seconds) {
            rep.out_of_budget = true;
            break;
        }
        if (cfg.max_expansions >= 0 && expansions_left <= 0) {
            rep.out_of_budget = true;
            break;
        }
        rep.iterations = round + 1;
        disc.sample(theta, rng);
        theta = theta.scaled(theta.growth);

        const EASProblem& p = disc.problem;
        rep.roadmap_vertices = disc.crg.roadmap.num_vertices();
        rep.num_actions = int(p.actions.size());

        ProblemIndex idx;
        std::optional<RelaxEval> ev;
        if (needs_relax) {
            idx.build(p, &disc.tests, use_reach ? &disc.crg : nullptr, use_reach);
            ev.emplace(idx);
        }

        SuccessorGen gen(disc, theta.place_throttle);
        SearchSpace space;
        space.is_goal = [&](const State& s) { return goal_satisfied(p, s, &disc.tests); };
        space.successors = [&](const State& s, std::vector<const Action*>& out) { gen(s, out); };
        // The successor generator only emits applicable actions, so stepping
        // skips re-validation (apply would re-run Reachable tests per child).
        space.step = [&](const State& s, const Action& a) {
            State out = s;
            for (const Effect& e : a.effect_span()) out[e.var] = e.value;
            return out;
        };
        space.heuristic = [&](const State& s) -> HeuristicResult {
            switch (cfg.heuristic) {
                case Heuristic::H0:
                    return {h_zero(s), {}};
                case Heuristic::Goals:
                    return {unsatisfied_goals(p, s, &disc.tests), {}};
                case Heuristic::MaxRob:
                    return {h_max(*ev, s), {}};
                case Heuristic::AddRob:
                    return {h_add(*ev, s), {}};
                case Heuristic::FF:
                case Heuristic::FFRob: {
                    return {h_ff(*ev, s, nullptr), {}};
                }
                case Heuristic::FFRobHA: {
                    std::vector<const Action*> rp;
                    float h = h_ff(*ev, s, &rp);
                    if (h >= kInf) return {kInf, {}};
                    return {h, ev->helpful_actions(rp)};
                }
            }
            return {0, {}};
        };

        SearchConfig scfg;
        scfg.strategy = cfg.strategy;
        scfg.w = cfg.w;
        scfg.use_helpful = cfg.heuristic == Heuristic::FFRobHA;
        // Split the remaining expansion budget evenly over the remaining
        // rounds: early episodes on sparse discretizations stay short, later
        // (denser) ones get the balance.
        scfg.max_expansions =
            cfg.max_expansions < 0
                ? -1
                : std::max<long>(1, expansions_left / (cfg.max_iterations - round));
        if (cfg.max_seconds >= 0) {
            scfg.max_seconds = cfg.max_seconds - elapsed();
            if (scfg.max_seconds <= 0) {
                rep.out_of_budget = true;
                break;
            }
        }

        SearchStats stats;
        auto result = search(p.initial, space, scfg, &stats);
        if (!result && scfg.use_helpful && !stats.out_of_budget) {
            // Helpful-action pruning is incomplete: the pruned space can be
            // exhausted even though the full space contains a plan. Retry
            // this round unpruned before growing the discretization.
            SearchConfig full = scfg;
            full.use_helpful = false;
            double remaining = cfg.max_seconds < 0 ? -1 : cfg.max_seconds - elapsed();
            full.max_seconds = remaining;
            SearchStats stats2;
            if (remaining < 0 || remaining > 0)
                result = search(p.initial, space, full, &stats2);
            stats.expansions += stats2.expansions;
            stats.evaluations += stats2.evaluations;
            stats.generated += stats2.generated;
            stats.dead_ends += stats2.dead_ends;
            stats.reopened += stats2.reopened;
        }
        expansions_left -= stats.expansions;
        rep.expansions += stats.expansions;
        rep.evaluations += stats.evaluations;
        rep.generated += stats.generated;
        rep.dead_ends += stats.dead_ends;
        rep.reopened += stats.reopened;
        rep.geometry_calls = long(disc.crg.stats.robot_obj_calls + disc.crg.stats.robot_grasp_calls +
                                  disc.crg.stats.grasp_obj_calls);

        if (result) {
            auto steps = validate_plan(disc, *result);
            if (steps) {
                rep.solved = true;
                rep.steps = std::move(*steps);
                for (const PlanStep& st : rep.steps) rep.plan_cost += st.action.cost;
                return rep;
            }
        }
        if (stats.out_of_budget && cfg.max_seconds >= 0 && elapsed() >= cfg.max_seconds) {
            rep.out_of_budget = true;
            break;
        }
    }
    return rep;
}

}  // namespace ffplan
