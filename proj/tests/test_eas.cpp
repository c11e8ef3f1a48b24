#include <catch2/catch_amalgamated.hpp>

#include "ffplan/eas.hpp"
#include "ffplan/rng.hpp"

using namespace ffplan;

namespace {

// Domains for random-formula testing: 3 variables, 4 values each.
constexpr int kVars = 3;

Value domain_value(VarId v, int i) {
    switch (v) {
        case 0: return Value::config(i);
        case 1: return i == 0 ? Value::none() : Value::grasp(i - 1, i);
        default: return i == 0 ? Value::none() : Value::pose(0, i);
    }
}

State random_state(Rng& rng) {
    State s;
    for (VarId v = 0; v < kVars; ++v) s.vals.push_back(domain_value(v, rng.below(4)));
    return s;
}

RelaxedState random_relaxed(Rng& rng) {
    RelaxedState s;
    s.sets.resize(kVars);
    for (VarId v = 0; v < kVars; ++v) {
        int mask = 1 + rng.below(15);  // nonempty subset of 4 values
        for (int i = 0; i < 4; ++i)
            if (mask & (1 << i)) s.sets[v].push_back(domain_value(v, i));
    }
    return s;
}

const Condition* random_formula(ConditionPool& pool, Rng& rng, int depth, bool negation_free) {
    int pick = depth == 0 ? 0 : rng.below(negation_free ? 3 : 4);
    switch (pick) {
        case 1: return pool.conj(random_formula(pool, rng, depth - 1, negation_free),
                                 random_formula(pool, rng, depth - 1, negation_free));
        case 2: return pool.disj(random_formula(pool, rng, depth - 1, negation_free),
                                 random_formula(pool, rng, depth - 1, negation_free));
        case 3: return pool.neg(random_formula(pool, rng, depth - 1, negation_free));
        default: {
            VarId v = rng.below(kVars);
            return pool.simple(v, domain_value(v, rng.below(4)));
        }
    }
}

// Oracle: bottom-up (can-be-true, can-be-false) pair per node, straight from
// the definition of relaxed truth with independent per-occurrence choices.
std::pair<bool, bool> oracle_tf(const Condition* c, const RelaxedState& s) {
    switch (c->type) {
        case Condition::Type::And: {
            auto [lt, lf] = oracle_tf(c->lhs, s);
            auto [rt, rf] = oracle_tf(c->rhs, s);
            return {lt && rt, lf || rf};
        }
        case Condition::Type::Or: {
            auto [lt, lf] = oracle_tf(c->lhs, s);
            auto [rt, rf] = oracle_tf(c->rhs, s);
            return {lt || rt, lf && rf};
        }
        case Condition::Type::Not: {
            auto [t, f] = oracle_tf(c->lhs, s);
            return {f, t};
        }
        default: {  // Simple
            const auto& set = s.values(c->var);
            bool member = false;
            for (const Value& y : set) member |= (y == c->value);
            bool only = set.size() == 1 && member;
            return {member, !only};
        }
    }
}

bool oracle_holds(const Condition* c, const State& s) {
    switch (c->type) {
        case Condition::Type::And: return oracle_holds(c->lhs, s) && oracle_holds(c->rhs, s);
        case Condition::Type::Or: return oracle_holds(c->lhs, s) || oracle_holds(c->rhs, s);
        case Condition::Type::Not: return !oracle_holds(c->lhs, s);
        default: return s(c->var) == c->value;
    }
}

}  // namespace

TEST_CASE("value packing round-trips kind, object and index") {
    for (auto [k, o, i] : {std::tuple{Value::Kind::Config, 0, 0},
                           {Value::Kind::Grasp, 255, 7},
                           {Value::Kind::PoseRef, 13, (1 << 21) - 1},
                           {Value::Kind::None, 0, 0}}) {
        Value v = Value::make(k, o, i);
        REQUIRE(v.kind() == k);
        REQUIRE(v.obj() == o);
        REQUIRE(v.index() == i);
    }
    REQUIRE(Value::config(3) != Value::pose(0, 3));
    REQUIRE(Value::none().is_none());
}

TEST_CASE("relaxed state add reports growth and preserves insertion order") {
    State s;
    s.vals = {Value::config(0), Value::none()};
    RelaxedState r = RelaxedState::singleton(s);
    REQUIRE(r.values(0).size() == 1);
    REQUIRE(r.add(0, Value::config(5)));
    REQUIRE_FALSE(r.add(0, Value::config(5)));
    REQUIRE(r.values(0) == std::vector<Value>{Value::config(0), Value::config(5)});
    REQUIRE(r.contains_none(1));
}

TEST_CASE("holds_relaxed matches truth-pair oracle on random formulas") {
    Rng rng(42);
    ConditionPool pool;
    for (int i = 0; i < 12000; ++i) {
        const Condition* c = random_formula(pool, rng, 1 + rng.below(4), false);
        RelaxedState s = random_relaxed(rng);
        auto [t, f] = oracle_tf(c, s);
        CAPTURE(i);
        REQUIRE(holds_relaxed(c, s, nullptr) == t);
        // F is exposed through negation.
        const Condition* nc = pool.neg(c);
        REQUIRE(holds_relaxed(nc, s, nullptr) == f);
    }
}

TEST_CASE("holds matches direct evaluation and singleton relaxed evaluation") {
    Rng rng(43);
    ConditionPool pool;
    for (int i = 0; i < 10000; ++i) {
        const Condition* c = random_formula(pool, rng, 1 + rng.below(4), false);
        State s = random_state(rng);
        bool expect = oracle_holds(c, s);
        REQUIRE(holds(c, s) == expect);
        REQUIRE(holds_relaxed(c, RelaxedState::singleton(s), nullptr) == expect);
    }
}

TEST_CASE("achievers are drawn from the relaxed state and suffice for monotone formulas") {
    Rng rng(44);
    ConditionPool pool;
    int sufficiency_checked = 0;
    for (int i = 0; i < 10000; ++i) {
        bool negation_free = rng.below(2) == 0;
        const Condition* c = random_formula(pool, rng, 1 + rng.below(3), negation_free);
        RelaxedState s = random_relaxed(rng);
        if (!holds_relaxed(c, s, nullptr)) continue;
        AchieverSet ach = achievers_relaxed(c, s, nullptr);
        for (auto [v, x] : ach.assignments) REQUIRE(s.contains(v, x));
        if (!negation_free) continue;
        // Restricting every mentioned variable to its achievers must keep a
        // negation-free condition relaxed-true (monotonicity).
        RelaxedState restricted;
        restricted.sets.resize(kVars);
        for (auto [v, x] : ach.assignments) restricted.sets[v].push_back(x);
        for (VarId v = 0; v < kVars; ++v)
            if (restricted.sets[v].empty()) restricted.sets[v] = s.sets[v];
        REQUIRE(holds_relaxed(c, restricted, nullptr));
        ++sufficiency_checked;
    }
    REQUIRE(sufficiency_checked > 1000);
}

TEST_CASE("achievers_relaxed rejects unsatisfied conditions") {
    ConditionPool pool;
    RelaxedState s;
    s.sets = {{Value::config(0)}};
    REQUIRE_THROWS_AS(achievers_relaxed(pool.simple(0, Value::config(1)), s, nullptr),
                      std::logic_error);
}

TEST_CASE("tested conditions delegate to the registered batched test") {
    ConditionPool pool;
    const Condition* r1 = pool.reachable(0, 1);
    const Condition* r2 = pool.reachable(0, 2);
    const Condition* r3 = pool.reachable(0, 3);

    int invocations = 0;
    TestContext ctx;
    ctx.register_test(TestKind::Reachable,
                      [&](std::span<const Condition* const> conds, const RelaxedState&) {
                          ++invocations;
                          std::vector<TestOutcome> out;
                          for (const Condition* c : conds) {
                              if (c->q_to != 3) {  // pretend vertex 3 is unreachable
                                  AchieverSet a;
                                  a.add(kVarHand, Value::none());
                                  out.push_back({c, a});
                              }
                          }
                          return out;
                      });

    RelaxedState s;
    s.sets = {{Value::config(0)}, {Value::none()}};

    SECTION("a batch of k conditions costs one test invocation") {
        std::array<const Condition*, 3> batch{r1, r2, r3};
        auto res = ctx.run(TestKind::Reachable, batch, s);
        REQUIRE(invocations == 1);
        REQUIRE(res.size() == 2);
        REQUIRE(res[0].cond == r1);
        REQUIRE_FALSE(res[0].achievers.empty());
    }

    SECTION("holds_relaxed and achievers_relaxed consult the test") {
        REQUIRE(holds_relaxed(r1, s, &ctx));
        REQUIRE_FALSE(holds_relaxed(r3, s, &ctx));
        AchieverSet a = achievers_relaxed(r1, s, &ctx);
        REQUIRE(a.assignments == std::vector<std::pair<VarId, Value>>{{kVarHand, Value::none()}});
        REQUIRE_THROWS(holds_relaxed(pool.neg(r1), s, &ctx));
    }

    SECTION("unregistered kinds raise") {
        std::array<const Condition*, 1> batch{pool.in_region(0, Rect(0, 0, 1, 1))};
        REQUIRE_THROWS(ctx.run(TestKind::InReg, batch, s));
    }
}

TEST_CASE("applicable and apply follow condition and effect semantics") {
    ConditionPool pool;
    State s;
    s.vals = {Value::config(0), Value::none(), Value::pose(0, 0), Value::none()};

    Action pick;
    pick.schema = Action::Schema::Pick;
    pick.conds = {pool.simple(kVarRobot, Value::config(0)),
                  pool.simple(kVarHand, Value::none()),
                  pool.simple(var_pose(0), Value::pose(0, 0))};
    pick.add_effect(kVarHand, Value::grasp(0, 0));
    pick.add_effect(var_pose(0), Value::none());

    REQUIRE(applicable(pick, s));
    State t = apply(pick, s);
    REQUIRE(t(kVarHand) == Value::grasp(0, 0));
    REQUIRE(t(var_pose(0)) == Value::none());
    REQUIRE(t(kVarRobot) == s(kVarRobot));
    REQUIRE_FALSE(applicable(pick, t));
    REQUIRE_THROWS_AS(apply(pick, t), std::logic_error);
    REQUIRE_FALSE(t == s);
    REQUIRE(StateHash{}(t) != StateHash{}(s));  // overwhelmingly likely
}

TEST_CASE("any_of builds a right-leaning disjunction over values") {
    ConditionPool pool;
    std::vector<Value> vals{Value::pose(0, 0), Value::pose(0, 1), Value::pose(0, 2)};
    const Condition* c = pool.any_of(var_pose(0), vals);
    State s;
    s.vals = {Value::config(0), Value::none(), Value::pose(0, 2), Value::none()};
    REQUIRE(holds(c, s));
    s.vals[var_pose(0)] = Value::pose(0, 3);
    REQUIRE_FALSE(holds(c, s));
}
