#include <catch2/catch_amalgamated.hpp>

#include "ffplan/rng.hpp"
#include "ffplan/search.hpp"

using namespace ffplan;

namespace {

Value val(int i) { return Value::config(i); }

struct Builder {
    EASProblem p;
    ConditionPool pool;

    Builder(int nvars, int dom) {
        p.num_objects = 0;
        for (int v = 0; v < nvars; ++v) {
            std::vector<Value> d;
            for (int i = 0; i < dom; ++i) d.push_back(val(i));
            p.domains.push_back(d);
            p.initial.vals.push_back(val(0));
        }
    }

    void add_action(std::vector<std::pair<VarId, int>> conds, std::pair<VarId, int> effect) {
        Action a;
        a.schema = Action::Schema::Custom;
        a.id = int(p.actions.size());
        for (auto [v, x] : conds) a.conds.push_back(pool.simple(v, val(x)));
        a.add_effect(effect.first, val(effect.second));
        p.actions.push_back(a);
    }
};

Builder random_problem(Rng& rng) {
    int nvars = 3 + rng.below(3);
    int dom = 2 + rng.below(3);
    Builder b(nvars, dom);
    int nact = 5 + rng.below(15);
    for (int i = 0; i < nact; ++i) {
        std::vector<std::pair<VarId, int>> conds;
        int nc = rng.below(3);
        for (int c = 0; c < nc; ++c) conds.push_back({rng.below(nvars), rng.below(dom)});
        b.add_action(conds, {rng.below(nvars), rng.below(dom)});
    }
    int ng = 1 + rng.below(2);
    for (int g = 0; g < ng; ++g) b.p.goal.push_back(b.pool.simple(rng.below(nvars), val(rng.below(dom))));
    return b;
}

SearchSpace make_space(const EASProblem& p, std::function<HeuristicResult(const State&)> h) {
    SearchSpace sp;
    sp.is_goal = [&p](const State& s) { return goal_satisfied(p, s, nullptr); };
    sp.successors = [&p](const State& s, std::vector<const Action*>& out) {
        for (const Action& a : p.actions)
            if (applicable(a, s)) out.push_back(&a);
    };
    sp.step = [](const State& s, const Action& a) { return apply(a, s); };
    sp.heuristic = std::move(h);
    return sp;
}

// Exhaustive uniform-cost distances over the full state space.
int dijkstra_optimal(const EASProblem& p) {
    std::unordered_map<State, int, StateHash> dist;
    std::vector<State> queue{p.initial};
    dist[p.initial] = 0;
    for (size_t i = 0; i < queue.size(); ++i) {
        State s = queue[i];
        if (goal_satisfied(p, s, nullptr)) return dist[s];
        for (const Action& a : p.actions) {
            if (!applicable(a, s)) continue;
            State t = apply(a, s);
            if (dist.emplace(t, dist[s] + 1).second) queue.push_back(t);
        }
    }
    return -1;
}

void replay(const EASProblem& p, const std::vector<const Action*>& plan) {
    State s = p.initial;
    for (const Action* a : plan) {
        REQUIRE(applicable(*a, s));
        s = apply(*a, s);
    }
    REQUIRE(goal_satisfied(p, s, nullptr));
}

}  // namespace

TEST_CASE("w=0 search is uniform-cost: plan cost equals exhaustive optimum") {
    Rng rng(1234);
    int solved = 0;
    for (int trial = 0; trial < 80; ++trial) {
        Builder b = random_problem(rng);
        int optimal = dijkstra_optimal(b.p);
        SearchSpace sp = make_space(b.p, [](const State&) { return HeuristicResult{0, {}}; });
        SearchConfig cfg;
        cfg.w = 0;
        for (Strategy st : {Strategy::BFS, Strategy::DBFS}) {
            cfg.strategy = st;
            auto plan = search(b.p.initial, sp, cfg);
            if (optimal < 0) {
                REQUIRE_FALSE(plan.has_value());
            } else {
                REQUIRE(plan.has_value());
                REQUIRE(int(plan->size()) == optimal);
                replay(b.p, *plan);
                ++solved;
            }
        }
    }
    REQUIRE(solved > 60);
}

TEST_CASE("weighted search returns valid plans and dbfs never evaluates more than bfs") {
    Rng rng(777);
    int compared = 0;
    for (int trial = 0; trial < 60; ++trial) {
        Builder b = random_problem(rng);
        ProblemIndex idx;
        idx.build(b.p, nullptr, nullptr, true);
        RelaxEval ev(idx);
        SearchSpace sp = make_space(
            b.p, [&](const State& s) { return HeuristicResult{h_add(ev, s), {}}; });

        SearchConfig cfg;
        cfg.w = 0.8;
        cfg.strategy = Strategy::BFS;
        SearchStats bstats, dstats;
        auto bplan = search(b.p.initial, sp, cfg, &bstats);
        cfg.strategy = Strategy::DBFS;
        auto dplan = search(b.p.initial, sp, cfg, &dstats);

        REQUIRE(bplan.has_value() == dplan.has_value());
        if (!bplan) continue;
        replay(b.p, *bplan);
        replay(b.p, *dplan);
        REQUIRE(dstats.evaluations <= bstats.evaluations);
        ++compared;
    }
    REQUIRE(compared > 30);
}

TEST_CASE("search is deterministic: repeated runs produce identical plans") {
    Rng rng(31337);
    for (int trial = 0; trial < 30; ++trial) {
        Builder b = random_problem(rng);
        ProblemIndex idx;
        idx.build(b.p, nullptr, nullptr, true);
        RelaxEval ev(idx);
        SearchSpace sp = make_space(
            b.p, [&](const State& s) { return HeuristicResult{h_add(ev, s), {}}; });
        SearchConfig cfg;
        cfg.strategy = Strategy::DBFS;
        auto p1 = search(b.p.initial, sp, cfg);
        auto p2 = search(b.p.initial, sp, cfg);
        REQUIRE(p1.has_value() == p2.has_value());
        if (p1) {
            REQUIRE(p1->size() == p2->size());
            for (size_t i = 0; i < p1->size(); ++i) REQUIRE((*p1)[i]->id == (*p2)[i]->id);
        }
    }
}

TEST_CASE("expansion budget is honored and reported") {
    // A long corridor of states: var 0 counts 0..49.
    Builder b(1, 50);
    for (int i = 0; i < 49; ++i) b.add_action({{0, i}}, {0, i + 1});
    b.p.goal.push_back(b.pool.simple(0, val(49)));
    SearchSpace sp = make_space(b.p, [](const State&) { return HeuristicResult{0, {}}; });
    SearchConfig cfg;
    cfg.w = 0;
    cfg.max_expansions = 10;
    SearchStats stats;
    auto plan = search(b.p.initial, sp, cfg, &stats);
    REQUIRE_FALSE(plan.has_value());
    REQUIRE(stats.out_of_budget);
    REQUIRE(stats.expansions == 10);
    cfg.max_expansions = -1;
    plan = search(b.p.initial, sp, cfg, &stats);
    REQUIRE(plan.has_value());
    REQUIRE(plan->size() == 49);
}

TEST_CASE("helpful-action pruning restricts successors and can still solve") {
    Builder b(6, 2);
    for (int i = 0; i < 5; ++i) b.add_action({{i, 1}}, {i + 1, 1});
    // Distractor actions that toggle variables pointlessly.
    for (int i = 1; i < 6; ++i) b.add_action({}, {i, 0});
    b.p.initial.vals[0] = val(1);
    b.p.goal.push_back(b.pool.simple(5, val(1)));

    ProblemIndex idx;
    idx.build(b.p, nullptr, nullptr, true);
    RelaxEval ev(idx);
    SearchSpace sp = make_space(b.p, [&](const State& s) {
        std::vector<const Action*> plan;
        float h = h_ff(ev, s, &plan);
        HeuristicResult r;
        r.h = h;
        if (h != kInf && h != 0) r.helpful = ev.helpful_actions(plan);
        return r;
    });
    SearchConfig cfg;
    cfg.strategy = Strategy::DBFS;
    cfg.use_helpful = true;
    SearchStats stats;
    auto plan = search(b.p.initial, sp, cfg, &stats);
    REQUIRE(plan.has_value());
    REQUIRE(plan->size() == 5);
    replay(b.p, *plan);
    // Pure chain: helpful actions keep the frontier to one child per node.
    REQUIRE(stats.generated <= 6);
}

TEST_CASE("unreachable goals fail fast when the initial heuristic is infinite") {
    Builder b(2, 2);
    b.p.goal.push_back(b.pool.simple(1, val(1)));  // nothing achieves it
    ProblemIndex idx;
    idx.build(b.p, nullptr, nullptr, true);
    RelaxEval ev(idx);
    SearchSpace sp = make_space(b.p, [&](const State& s) { return HeuristicResult{h_add(ev, s), {}}; });
    SearchConfig cfg;
    SearchStats stats;
    REQUIRE_FALSE(search(b.p.initial, sp, cfg, &stats).has_value());
    REQUIRE(stats.expansions == 0);
}
