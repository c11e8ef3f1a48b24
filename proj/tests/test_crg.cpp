#include <catch2/catch_amalgamated.hpp>

#include "ffplan/crg.hpp"
#include "ffplan/rng.hpp"

using namespace ffplan;

namespace {

// Direct evaluation of the per-edge validity formula with fresh geometry
// calls (no caches), followed by plain BFS. Independent of ReachContext's
// incremental machinery.
struct Oracle {
    const CRG& crg;

    bool grasp_ok(const RelaxedState& s, int e, int rho_obj, int rho_pose) const {
        for (const Value& g : s.values(kVarHand)) {
            if (g.is_none()) return true;
            if (g.kind() != Value::Kind::Grasp) continue;
            bool ok;
            if (rho_obj < 0)
                ok = !robot_grasp_c(crg.roadmap.edges[e].traj, crg.world->robot_radius,
                                    crg.grasp(g.obj(), g.index()), crg.object_shape(g.obj()),
                                    *crg.world);
            else
                ok = !grasp_obj_c(crg.roadmap.edges[e].traj, crg.grasp(g.obj(), g.index()),
                                  crg.object_shape(g.obj()), crg.object_shape(rho_obj),
                                  crg.pose_coord(rho_obj, rho_pose));
            if (ok) return true;
        }
        return false;
    }

    bool obj_ok(const RelaxedState& s, int e, int o) const {
        for (const Value& p : s.values(var_pose(o))) {
            if (p.is_none()) return true;
            if (p.kind() != Value::Kind::PoseRef) continue;
            bool clear = !robot_obj_c(crg.roadmap.edges[e].traj, crg.world->robot_radius,
                                      crg.object_shape(o), crg.pose_coord(o, p.index()));
            if (clear && grasp_ok(s, e, o, p.index())) return true;
        }
        return false;
    }

    bool edge_ok(const RelaxedState& s, int e) const {
        if (!grasp_ok(s, e, -1, -1)) return false;
        for (int o = 0; o < crg.num_objects(); ++o)
            if (!obj_ok(s, e, o)) return false;
        return true;
    }

    std::vector<char> reachable_from(const RelaxedState& s, int q0) const {
        std::vector<char> seen(crg.roadmap.num_vertices(), 0);
        std::vector<int> queue{q0};
        seen[q0] = 1;
        for (size_t i = 0; i < queue.size(); ++i) {
            for (auto [e, w] : crg.roadmap.adj[queue[i]]) {
                if (!seen[w] && edge_ok(s, e)) {
                    seen[w] = 1;
                    queue.push_back(w);
                }
            }
        }
        return seen;
    }
};

struct TestSetup {
    World world;
    CRG crg;
    ConditionPool pool;
};

// Random small world: up to 3 disc objects with a handful of candidate poses
// and grasps, a roadmap of bare-valid edges over <= 8 vertices.
std::unique_ptr<TestSetup> random_setup(Rng& rng) {
    auto ts = std::make_unique<TestSetup>();
    World& w = ts->world;
    w.workspace = Rect(0, 0, 12, 12);
    w.robot_radius = 0.5;
    if (rng.below(2)) w.obstacles.push_back({Shape::rect(1.0, 0.6), Pose{rng.uniform(3, 9), rng.uniform(3, 9)}});

    int m = 1 + rng.below(3);
    for (int o = 0; o < m; ++o) {
        ObjectSpec spec;
        spec.name = "o" + std::to_string(o);
        spec.radius = rng.uniform(0.3, 0.6);
        w.objects.push_back(spec);
    }

    CRG& crg = ts->crg;
    crg.init(&w);
    for (int o = 0; o < m; ++o) {
        int np = 1 + rng.below(4);
        for (int p = 0; p < np; ++p)
            crg.poses[o].push_back({rng.uniform(1, 11), rng.uniform(1, 11)});
        int ng = 1 + rng.below(2);
        for (int g = 0; g < ng; ++g) {
            double ang = rng.uniform(0, 6.2831853);
            double len = w.robot_radius + w.objects[o].radius;
            crg.grasp_offsets[o].push_back({len * std::cos(ang), len * std::sin(ang)});
        }
    }

    int nv = 4 + rng.below(5);
    for (int i = 0; i < nv; ++i) {
        Vec2 q;
        do q = {rng.uniform(1, 11), rng.uniform(1, 11)};
        while (!config_free(q, w.robot_radius, w));
        crg.roadmap.add_vertex(q);
    }
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j) {
            if (rng.below(3) == 0) continue;
            Segment seg{crg.roadmap.vertices[i], crg.roadmap.vertices[j]};
            if (traj_free_fixed(seg, w.robot_radius, w)) crg.roadmap.add_edge(i, j);
        }
    return ts;
}

RelaxedState random_crg_state(const CRG& crg, Rng& rng) {
    RelaxedState s;
    int m = crg.num_objects();
    s.sets.resize(num_vars(m));
    s.sets[kVarRobot] = {Value::config(0)};
    if (rng.below(3) == 0) s.sets[kVarHand].push_back(Value::none());
    for (int o = 0; o < m; ++o)
        for (int g = 0; g < int(crg.grasp_offsets[o].size()); ++g)
            if (rng.below(2)) s.sets[kVarHand].push_back(Value::grasp(o, g));
    if (s.sets[kVarHand].empty()) s.sets[kVarHand].push_back(Value::none());
    for (int o = 0; o < m; ++o) {
        VarId v = var_pose(o);
        if (rng.below(4) == 0) s.sets[v].push_back(Value::none());
        for (int p = 0; p < int(crg.poses[o].size()); ++p)
            if (rng.below(2)) s.sets[v].push_back(Value::pose(o, p));
        if (s.sets[v].empty()) s.sets[v].push_back(Value::pose(o, 0));
        s.sets[var_status(o)] = {Value::none()};
    }
    return s;
}

}  // namespace

TEST_CASE("relaxed reachability matches direct-formula BFS oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 250; ++trial) {
        auto ts = random_setup(rng);
        CRG& crg = ts->crg;
        Oracle oracle{crg};
        RelaxedState s = random_crg_state(crg, rng);
        int q0 = rng.below(crg.roadmap.num_vertices());

        ReachContext ctx(crg, /*track_achievers=*/true);
        ctx.attach(&s);
        ctx.add_root(q0);
        ctx.drain();

        auto expect = oracle.reachable_from(s, q0);
        for (int q = 0; q < crg.roadmap.num_vertices(); ++q) {
            CAPTURE(trial, q0, q);
            REQUIRE(ctx.connected(q0, q) == bool(expect[q]));
        }
    }
}

TEST_CASE("reachability stays correct under monotone relaxed-state growth") {
    Rng rng(77);
    for (int trial = 0; trial < 120; ++trial) {
        auto ts = random_setup(rng);
        CRG& crg = ts->crg;
        Oracle oracle{crg};

        // Start from a minimal state, then feed one value at a time.
        RelaxedState full = random_crg_state(crg, rng);
        RelaxedState s;
        s.sets.resize(full.sets.size());
        for (size_t v = 0; v < full.sets.size(); ++v) s.sets[v] = {full.sets[v].front()};

        ReachContext ctx(crg, true);
        ctx.attach(&s);
        int q0 = rng.below(crg.roadmap.num_vertices());
        ctx.add_root(q0);
        ctx.drain();

        std::vector<std::pair<VarId, Value>> additions;
        for (size_t v = 0; v < full.sets.size(); ++v)
            for (size_t i = 1; i < full.sets[v].size(); ++i)
                additions.push_back({VarId(v), full.sets[v][i]});

        for (auto [v, x] : additions) {
            s.add(v, x);
            ctx.on_value_added(v, x);
            ctx.drain();
            auto expect = oracle.reachable_from(s, q0);
            for (int q = 0; q < crg.roadmap.num_vertices(); ++q) {
                CAPTURE(trial, q0, q);
                REQUIRE(ctx.connected(q0, q) == bool(expect[q]));
            }
        }
    }
}

TEST_CASE("traced achievers come from the state and suffice for the connection") {
    Rng rng(31);
    int traced = 0;
    for (int trial = 0; trial < 150; ++trial) {
        auto ts = random_setup(rng);
        CRG& crg = ts->crg;
        RelaxedState s = random_crg_state(crg, rng);
        int q0 = rng.below(crg.roadmap.num_vertices());

        ReachContext ctx(crg, true);
        ctx.attach(&s);
        ctx.add_root(q0);
        ctx.drain();

        for (int q = 0; q < crg.roadmap.num_vertices(); ++q) {
            if (q == q0 || !ctx.connected(q0, q)) continue;
            AchieverSet ach = ctx.trace(q0, q);
            for (auto [v, x] : ach.assignments) REQUIRE(s.contains(v, x));
            // Restrict hand/pose variables to the traced achievers: q must
            // remain reachable (each path edge passed using those values).
            RelaxedState restricted = s;
            for (VarId v = 0; v < VarId(s.sets.size()); ++v) {
                if (v != kVarHand && !is_pose_var(v)) continue;
                std::vector<Value> keep;
                for (auto [av, x] : ach.assignments)
                    if (av == v) keep.push_back(x);
                if (!keep.empty()) restricted.sets[v] = keep;
            }
            Oracle oracle{crg};
            REQUIRE(oracle.reachable_from(restricted, q0)[q]);
            ++traced;
        }
    }
    REQUIRE(traced > 200);
}

TEST_CASE("corridor example: blocking object gates the edge until moved or lifted") {
    World w;
    w.workspace = Rect(0, 0, 20, 20);
    w.robot_radius = 0.5;
    ObjectSpec obj;
    obj.name = "blocker";
    obj.radius = 0.4;
    w.objects.push_back(obj);

    CRG crg;
    crg.init(&w);
    crg.poses[0] = {{10, 10}, {10, 15}};  // pose 0 blocks A-B, pose 1 is clear
    crg.grasp_offsets[0] = {{0.9, 0.0}};
    int A = crg.roadmap.add_vertex({2, 10});
    int B = crg.roadmap.add_vertex({18, 10});
    crg.roadmap.add_edge(A, B);

    ConditionPool pool;
    const Condition* c = pool.reachable(A, B);

    RelaxedState s;
    s.sets.resize(num_vars(1));
    s.sets = {{Value::config(A)}, {Value::none()}, {Value::pose(0, 0)}, {Value::none()}};

    SECTION("blocked at the initial pose") {
        ReachContext ctx(crg, true);
        REQUIRE(ctx.query(std::array{c}, s).empty());
    }
    SECTION("a clear alternative pose opens the edge and is the achiever") {
        s.add(var_pose(0), Value::pose(0, 1));
        ReachContext ctx(crg, true);
        auto res = ctx.query(std::array{c}, s);
        REQUIRE(res.size() == 1);
        bool uses_clear_pose = false;
        for (auto [v, x] : res[0].achievers.assignments)
            uses_clear_pose |= (v == var_pose(0) && x == Value::pose(0, 1));
        REQUIRE(uses_clear_pose);
    }
    SECTION("lifting the object (pose None) opens the edge") {
        s.add(var_pose(0), Value::none());
        ReachContext ctx(crg, true);
        REQUIRE(ctx.query(std::array{c}, s).size() == 1);
    }
}

TEST_CASE("repeated queries with an unchanged state touch no new edges") {
    Rng rng(55);
    auto ts = random_setup(rng);
    RelaxedState s = random_crg_state(ts->crg, rng);
    ReachContext ctx(ts->crg, true);
    ctx.attach(&s);
    ctx.add_root(0);
    ctx.drain();
    long tried = ctx.edges_tried();
    long sweeps = ts->crg.stats.sweeps;
    ctx.add_root(0);
    ctx.drain();
    REQUIRE(ctx.edges_tried() == tried);
    REQUIRE(ts->crg.stats.sweeps == sweeps);  // no-op drain is not a sweep
}

TEST_CASE("validity cache: one primitive call per edge/placement/grasp key") {
    Rng rng(66);
    for (int trial = 0; trial < 40; ++trial) {
        auto ts = random_setup(rng);
        CRG& crg = ts->crg;
        crg.audit_duplicates = true;
        // Many contexts over many states share the persistent cache.
        for (int k = 0; k < 6; ++k) {
            RelaxedState s = random_crg_state(crg, rng);
            ReachContext ctx(crg, true);
            ctx.attach(&s);
            ctx.add_root(rng.below(crg.roadmap.num_vertices()));
            ctx.drain();
        }
        REQUIRE(crg.stats.duplicate_primitive_calls == 0);
        REQUIRE(crg.audit_cache() == 0);
    }
}

TEST_CASE("mode cache answers singleton reachability like a fresh context") {
    Rng rng(88);
    for (int trial = 0; trial < 60; ++trial) {
        auto ts = random_setup(rng);
        CRG& crg = ts->crg;
        ModeReachCache cache(crg);
        Oracle oracle{crg};
        for (int k = 0; k < 10; ++k) {
            State st;
            int m = crg.num_objects();
            st.vals.resize(num_vars(m), Value::none());
            st.vals[kVarRobot] = Value::config(rng.below(crg.roadmap.num_vertices()));
            int held = rng.below(m + 1) - 1;
            if (held >= 0) st.vals[kVarHand] = Value::grasp(held, rng.below(int(crg.grasp_offsets[held].size())));
            for (int o = 0; o < m; ++o)
                if (o != held) st.vals[var_pose(o)] = Value::pose(o, rng.below(int(crg.poses[o].size())));
            int q2 = rng.below(crg.roadmap.num_vertices());
            auto expect = oracle.reachable_from(RelaxedState::singleton(st), st(kVarRobot).index());
            REQUIRE(cache.reachable(st, st(kVarRobot).index(), q2) == bool(expect[q2]));
        }
    }
}
