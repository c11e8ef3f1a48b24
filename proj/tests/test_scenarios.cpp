#include <catch2/catch_amalgamated.hpp>

#include <unordered_set>

#include "ffplan/scenario.hpp"

using namespace ffplan;

namespace {

/// Exhausts the state space reachable through successors that pass `allow`,
/// returning true iff some reachable state satisfies the goal. Used to show
/// infeasibility of restricted action subsets on small discretizations.
bool restricted_reachable_goal(Discretization& disc,
                               const std::function<bool(const Action&)>& allow,
                               long max_states = 500000) {
    const EASProblem& p = disc.problem;
    SuccessorGen gen(disc, /*place_throttle=*/-1);
    std::unordered_set<State, StateHash> seen{p.initial};
    std::vector<State> queue{p.initial};
    std::vector<const Action*> succ;
    for (size_t i = 0; i < queue.size(); ++i) {
        const State s = queue[i];
        if (goal_satisfied(p, s, &disc.tests)) return true;
        succ.clear();
        gen(s, succ);
        for (const Action* a : succ) {
            if (!allow(*a)) continue;
            State t = s;
            for (const Effect& e : a->effect_span()) t[e.var] = e.value;
            if (long(seen.size()) >= max_states) throw std::runtime_error("state cap hit");
            if (seen.insert(t).second) queue.push_back(t);
        }
    }
    return false;
}

bool object_name_starts_with(const PPMProblem& ppm, int obj, const std::string& prefix) {
    return obj >= 0 && ppm.world.objects[size_t(obj)].name.rfind(prefix, 0) == 0;
}

}  // namespace

TEST_CASE("all built-in scenarios load and pass the legality audit") {
    auto suite = builtin_scenarios();
    REQUIRE(suite.size() == 9);
    std::vector<std::string> names;
    for (const Scenario& sc : suite) {
        REQUIRE_NOTHROW(audit_scenario(sc));
        names.push_back(sc.name);
    }
    REQUIRE(names == std::vector<std::string>{"E0", "R1", "R2", "N1", "N2", "M1", "M2", "C4",
                                              "K5"});
}

TEST_CASE("scenario JSON serialization round-trips") {
    for (const Scenario& sc : builtin_scenarios()) {
        CAPTURE(sc.name);
        nlohmann::json j1 = scenario_to_json(sc);
        Scenario back = scenario_from_json(j1);
        nlohmann::json j2 = scenario_to_json(back);
        REQUIRE(j1 == j2);
        REQUIRE_NOTHROW(audit_scenario(back));
    }
}

TEST_CASE("scenario sizes match their stated construction") {
    auto count_objects = [](const char* name) {
        return builtin_scenario(name)->ppm.world.objects.size();
    };
    REQUIRE(count_objects("R1") == 8);
    REQUIRE(count_objects("R2") == 16);
    REQUIRE(count_objects("C4") == 21);  // target + ~20 clutter discs
    // Every rearrangement disc carries an explicit goal pose.
    for (const char* name : {"R1", "R2"}) {
        Scenario sc = *builtin_scenario(name);
        for (const ObjectGoal& g : sc.ppm.goals) REQUIRE(g.pose.has_value());
    }
}

TEST_CASE("wall scenario is infeasible when the doorway plugs may not be touched") {
    Scenario sc = *builtin_scenario("N1");
    Discretization disc(sc.ppm);
    Rng rng(3);
    disc.sample(sc.theta, rng);

    // Forbid manipulating any plug: the remaining actions can move the robot
    // and the (unreachable) targets only, so the goal is unattainable.
    auto no_plug_moves = [&](const Action& a) {
        if (a.schema != Action::Schema::Pick && a.schema != Action::Schema::Place) return true;
        return !object_name_starts_with(sc.ppm, a.obj, "plug_");
    };
    REQUIRE_FALSE(restricted_reachable_goal(disc, no_plug_moves));

    // Sanity: the unrestricted problem is solvable on the same tables.
    PlannerConfig cfg;
    cfg.theta = sc.theta;
    cfg.seed = 3;
    cfg.max_seconds = 120;
    REQUIRE(plan(sc.ppm, cfg).solved);
}

TEST_CASE("nonmonotonic scenario requires undoing satisfied stay-put goals") {
    Scenario sc = *builtin_scenario("M1");
    Discretization disc(sc.ppm);
    Rng rng(1);
    disc.sample(sc.theta, rng);

    // With the stay-put blockers frozen, the green disc cannot be reached,
    // so no restricted plan exists.
    auto no_blocker_moves = [&](const Action& a) {
        if (a.schema != Action::Schema::Pick && a.schema != Action::Schema::Place) return true;
        return !object_name_starts_with(sc.ppm, a.obj, "blk_");
    };
    REQUIRE_FALSE(restricted_reachable_goal(disc, no_blocker_moves));

    // A found plan must pick at least two blockers whose goals are satisfied
    // at the start (both the source and the destination ring are sealed).
    PlannerConfig cfg;
    cfg.theta = sc.theta;
    cfg.seed = 1;
    cfg.max_seconds = 150;
    cfg.max_expansions = 100000;
    PlanReport rep = plan(sc.ppm, cfg);
    REQUIRE(rep.solved);
    int undoing_picks = 0;
    for (const PlanStep& st : rep.steps)
        if (st.action.schema == Action::Schema::Pick &&
            object_name_starts_with(sc.ppm, st.action.obj, "blk_"))
            ++undoing_picks;
    REQUIRE(undoing_picks >= 2);
}
