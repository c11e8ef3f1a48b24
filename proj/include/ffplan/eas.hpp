#pragma once
/**
 * @file
 * @brief Extended action specification: multivalued planning variables whose
 *  action conditions may be arbitrary Boolean formulas, optionally evaluated
 *  by external batched tests. Includes standard and relaxed (delete-free)
 *  condition evaluation with achiever extraction.
 */

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffplan/world.hpp"

namespace ffplan {

// ---------------------------------------------------------------------------
// Variables. A problem with m objects has variables
//   v_r (robot config), v_h (held grasp), and per object v_o (pose), v_d
//   (symbolic status). Identified by dense indices.

using VarId = int;

inline constexpr VarId kVarRobot = 0;
inline constexpr VarId kVarHand = 1;
inline VarId var_pose(int obj) { return 2 + 2 * obj; }
inline VarId var_status(int obj) { return 3 + 2 * obj; }
inline int num_vars(int num_objects) { return 2 + 2 * num_objects; }
inline bool is_pose_var(VarId v) { return v >= 2 && (v - 2) % 2 == 0; }
inline bool is_status_var(VarId v) { return v >= 2 && (v - 2) % 2 == 1; }
inline int var_object(VarId v) { return (v - 2) / 2; }

// ---------------------------------------------------------------------------
// Values, packed into 32 bits: 3-bit kind, 8-bit object, 21-bit index.
// Config and pose values are references into the active discretization's
// vertex and pose tables.

struct Value {
    enum class Kind : uint8_t { Config = 0, Grasp, PoseRef, None, Cleaned, Cooked };

    uint32_t bits = 0;

    static Value make(Kind k, int obj, int index) {
        Value v;
        v.bits = (uint32_t(k) << 29) | (uint32_t(obj & 0xff) << 21) | uint32_t(index & 0x1fffff);
        return v;
    }
    static Value config(int idx) { return make(Kind::Config, 0, idx); }
    static Value grasp(int obj, int g) { return make(Kind::Grasp, obj, g); }
    static Value pose(int obj, int p) { return make(Kind::PoseRef, obj, p); }
    static Value none() { return make(Kind::None, 0, 0); }
    static Value cleaned() { return make(Kind::Cleaned, 0, 0); }
    static Value cooked() { return make(Kind::Cooked, 0, 0); }

    Kind kind() const { return Kind(bits >> 29); }
    int obj() const { return int((bits >> 21) & 0xff); }
    int index() const { return int(bits & 0x1fffff); }
    bool is_none() const { return kind() == Kind::None; }

    bool operator==(const Value& o) const { return bits == o.bits; }
    bool operator!=(const Value& o) const { return bits != o.bits; }
    bool operator<(const Value& o) const { return bits < o.bits; }
};

struct ValueHash {
    size_t operator()(const Value& v) const { return std::hash<uint32_t>{}(v.bits); }
};

// ---------------------------------------------------------------------------
// States

/// Total assignment of one value per variable.
struct State {
    std::vector<Value> vals;

    State() = default;
    explicit State(int nvars) : vals(nvars, Value::none()) {}

    Value operator()(VarId v) const { return vals[v]; }
    Value& operator[](VarId v) { return vals[v]; }
    int size() const { return static_cast<int>(vals.size()); }

    bool operator==(const State& o) const { return vals == o.vals; }

    size_t hash() const {
        size_t h = 0x9e3779b97f4a7c15ull;
        for (const Value& v : vals) h = (h ^ v.bits) * 0x100000001b3ull;
        return h;
    }
};

struct StateHash {
    size_t operator()(const State& s) const { return s.hash(); }
};

/// Assignment of a nonempty, insertion-ordered value set per variable.
/// Grows monotonically during relaxed exploration.
struct RelaxedState {
    std::vector<std::vector<Value>> sets;

    RelaxedState() = default;
    explicit RelaxedState(int nvars) : sets(nvars) {}

    static RelaxedState singleton(const State& s) {
        RelaxedState r(s.size());
        for (int v = 0; v < s.size(); ++v) r.sets[v].push_back(s(v));
        return r;
    }

    int size() const { return static_cast<int>(sets.size()); }
    const std::vector<Value>& values(VarId v) const { return sets[v]; }

    bool contains(VarId v, Value x) const {
        for (const Value& y : sets[v])
            if (y == x) return true;
        return false;
    }
    bool contains_none(VarId v) const { return contains(v, Value::none()); }

    /// Adds x to v's set; returns true when the set actually grew.
    bool add(VarId v, Value x) {
        if (contains(v, x)) return false;
        sets[v].push_back(x);
        return true;
    }
};

// ---------------------------------------------------------------------------
// Conditions: Boolean formula trees over simple equalities, plus opaque
// tested conditions (Reachable, InReg) evaluated through registered tests.

enum class TestKind : uint8_t { Reachable = 0, InReg = 1 };
inline constexpr int kNumTestKinds = 2;

struct Condition {
    enum class Type : uint8_t { Simple, And, Or, Not, Tested };

    Type type = Type::Simple;

    // Simple
    VarId var = -1;
    Value value;

    // And / Or / Not (rhs unused for Not)
    const Condition* lhs = nullptr;
    const Condition* rhs = nullptr;

    // Tested
    TestKind tkind = TestKind::Reachable;
    int q_from = -1, q_to = -1;  // Reachable: roadmap vertex indices
    int obj = -1;                // InReg: object index
    Rect region;                 // InReg: pose region

    // Registry id assigned when the condition is indexed as a top-level
    // condition of a problem; -1 for subformulas.
    mutable int id = -1;
};

/// Owns condition nodes; pointers remain stable for the pool's lifetime.
class ConditionPool {
public:
    const Condition* simple(VarId v, Value x) {
        Condition c;
        c.type = Condition::Type::Simple;
        c.var = v;
        c.value = x;
        return &nodes_.emplace_back(c);
    }
    const Condition* conj(const Condition* a, const Condition* b) {
        Condition c;
        c.type = Condition::Type::And;
        c.lhs = a;
        c.rhs = b;
        return &nodes_.emplace_back(c);
    }
    const Condition* disj(const Condition* a, const Condition* b) {
        Condition c;
        c.type = Condition::Type::Or;
        c.lhs = a;
        c.rhs = b;
        return &nodes_.emplace_back(c);
    }
    const Condition* neg(const Condition* a) {
        Condition c;
        c.type = Condition::Type::Not;
        c.lhs = a;
        return &nodes_.emplace_back(c);
    }
    const Condition* reachable(int q_from, int q_to) {
        Condition c;
        c.type = Condition::Type::Tested;
        c.tkind = TestKind::Reachable;
        c.q_from = q_from;
        c.q_to = q_to;
        return &nodes_.emplace_back(c);
    }
    const Condition* in_region(int obj, const Rect& region) {
        Condition c;
        c.type = Condition::Type::Tested;
        c.tkind = TestKind::InReg;
        c.obj = obj;
        c.region = region;
        return &nodes_.emplace_back(c);
    }

    /// Disjunction over [v = x] for each x; nullptr for an empty list.
    const Condition* any_of(VarId v, std::span<const Value> xs) {
        const Condition* acc = nullptr;
        for (const Value& x : xs) {
            const Condition* leaf = simple(v, x);
            acc = acc ? disj(acc, leaf) : leaf;
        }
        return acc;
    }

    size_t size() const { return nodes_.size(); }

private:
    std::deque<Condition> nodes_;
};

// ---------------------------------------------------------------------------
// Achievers and condition tests

/// A set of (variable, value) assignments drawn from a relaxed state that
/// witnesses a condition's truth.
struct AchieverSet {
    std::vector<std::pair<VarId, Value>> assignments;

    void add(VarId v, Value x) {
        for (auto& [w, y] : assignments)
            if (w == v && y == x) return;
        assignments.push_back({v, x});
    }
    void merge(const AchieverSet& o) {
        for (auto& [v, x] : o.assignments) add(v, x);
    }
    bool empty() const { return assignments.empty(); }
    size_t size() const { return assignments.size(); }
};

/// One satisfied condition with its achiever assignment, as returned by a
/// batched test.
struct TestOutcome {
    const Condition* cond = nullptr;
    AchieverSet achievers;
};

/// Batched evaluation of tested conditions against a relaxed state. Returns
/// the satisfied subset paired with achievers.
using TestFn =
    std::function<std::vector<TestOutcome>(std::span<const Condition* const>, const RelaxedState&)>;

/// Per-worker registry of condition tests. One test per kind.
class TestContext {
public:
    void register_test(TestKind kind, TestFn fn) { tests_[int(kind)] = std::move(fn); }
    bool has(TestKind kind) const { return bool(tests_[int(kind)]); }

    std::vector<TestOutcome> run(TestKind kind, std::span<const Condition* const> conds,
                                 const RelaxedState& s_plus) const {
        const TestFn& fn = tests_[int(kind)];
        if (!fn) throw std::runtime_error("no test registered for tested condition kind");
        return fn(conds, s_plus);
    }

private:
    std::array<TestFn, kNumTestKinds> tests_;
};

// ---------------------------------------------------------------------------
// Condition evaluation. holds_relaxed implements the mutually recursive T/F
// pair; achievers_relaxed the TA/FA pair. `any` tie-breaking is the first
// element in insertion order, so runs are reproducible.

bool holds_relaxed(const Condition* c, const RelaxedState& s_plus, const TestContext* ctx);

namespace detail {

inline bool eval_tested(const Condition* c, const RelaxedState& s_plus, const TestContext* ctx) {
    if (!ctx) throw std::runtime_error("tested condition evaluated without a test context");
    std::array<const Condition*, 1> batch{c};
    return !ctx->run(c->tkind, batch, s_plus).empty();
}

inline bool eval_false_relaxed(const Condition* c, const RelaxedState& s_plus,
                               const TestContext* ctx) {
    switch (c->type) {
        case Condition::Type::And:
            return eval_false_relaxed(c->lhs, s_plus, ctx) ||
                   eval_false_relaxed(c->rhs, s_plus, ctx);
        case Condition::Type::Or:
            return eval_false_relaxed(c->lhs, s_plus, ctx) &&
                   eval_false_relaxed(c->rhs, s_plus, ctx);
        case Condition::Type::Not:
            return holds_relaxed(c->lhs, s_plus, ctx);
        case Condition::Type::Simple: {
            const auto& set = s_plus.values(c->var);
            return !(set.size() == 1 && set[0] == c->value);
        }
        case Condition::Type::Tested:
            // F on a tested condition: some assignment falsifies it. Only
            // meaningful under Not, which PPM schemas never emit over tests.
            throw std::runtime_error("negated tested condition is not supported");
    }
    return false;
}

}  // namespace detail

inline bool holds_relaxed(const Condition* c, const RelaxedState& s_plus, const TestContext* ctx) {
    switch (c->type) {
        case Condition::Type::And:
            return holds_relaxed(c->lhs, s_plus, ctx) && holds_relaxed(c->rhs, s_plus, ctx);
        case Condition::Type::Or:
            return holds_relaxed(c->lhs, s_plus, ctx) || holds_relaxed(c->rhs, s_plus, ctx);
        case Condition::Type::Not:
            return detail::eval_false_relaxed(c->lhs, s_plus, ctx);
        case Condition::Type::Simple:
            return s_plus.contains(c->var, c->value);
        case Condition::Type::Tested:
            return detail::eval_tested(c, s_plus, ctx);
    }
    return false;
}

/// Standard-state evaluation: tested conditions are delegated to the test
/// with the singleton relaxed view of s, so holds == holds_relaxed on states.
inline bool holds(const Condition* c, const State& s, const TestContext* ctx = nullptr) {
    switch (c->type) {
        case Condition::Type::And:
            return holds(c->lhs, s, ctx) && holds(c->rhs, s, ctx);
        case Condition::Type::Or:
            return holds(c->lhs, s, ctx) || holds(c->rhs, s, ctx);
        case Condition::Type::Not:
            return !holds(c->lhs, s, ctx);
        case Condition::Type::Simple:
            return s(c->var) == c->value;
        case Condition::Type::Tested:
            return detail::eval_tested(c, RelaxedState::singleton(s), ctx);
    }
    return false;
}

namespace detail {

void achievers_true(const Condition* c, const RelaxedState& s_plus, const TestContext* ctx,
                    AchieverSet& out);

inline void achievers_false(const Condition* c, const RelaxedState& s_plus, const TestContext* ctx,
                            AchieverSet& out) {
    switch (c->type) {
        case Condition::Type::And:
            // any(): first falsifiable conjunct in order.
            if (eval_false_relaxed(c->lhs, s_plus, ctx))
                achievers_false(c->lhs, s_plus, ctx, out);
            else
                achievers_false(c->rhs, s_plus, ctx, out);
            return;
        case Condition::Type::Or:
            achievers_false(c->lhs, s_plus, ctx, out);
            achievers_false(c->rhs, s_plus, ctx, out);
            return;
        case Condition::Type::Not:
            achievers_true(c->lhs, s_plus, ctx, out);
            return;
        case Condition::Type::Simple:
            for (const Value& y : s_plus.values(c->var)) {
                if (y != c->value) {
                    out.add(c->var, y);
                    return;
                }
            }
            // Singleton {x}: F is false here; callers guard against this.
            throw std::logic_error("achievers_false on non-falsifiable atom");
        case Condition::Type::Tested:
            throw std::runtime_error("negated tested condition is not supported");
    }
}

inline void achievers_true(const Condition* c, const RelaxedState& s_plus, const TestContext* ctx,
                           AchieverSet& out) {
    switch (c->type) {
        case Condition::Type::And:
            achievers_true(c->lhs, s_plus, ctx, out);
            achievers_true(c->rhs, s_plus, ctx, out);
            return;
        case Condition::Type::Or:
            // any(): first satisfiable disjunct in order.
            if (holds_relaxed(c->lhs, s_plus, ctx))
                achievers_true(c->lhs, s_plus, ctx, out);
            else
                achievers_true(c->rhs, s_plus, ctx, out);
            return;
        case Condition::Type::Not:
            achievers_false(c->lhs, s_plus, ctx, out);
            return;
        case Condition::Type::Simple:
            out.add(c->var, c->value);
            return;
        case Condition::Type::Tested: {
            if (!ctx) throw std::runtime_error("tested condition evaluated without a test context");
            std::array<const Condition*, 1> batch{c};
            auto res = ctx->run(c->tkind, batch, s_plus);
            if (res.empty()) throw std::logic_error("achievers requested for unsatisfied test");
            out.merge(res.front().achievers);
            return;
        }
    }
}

}  // namespace detail

/// Requires holds_relaxed(c, s_plus). Deterministic for a fixed insertion
/// order of the relaxed state's value sets.
inline AchieverSet achievers_relaxed(const Condition* c, const RelaxedState& s_plus,
                                     const TestContext* ctx) {
    if (!holds_relaxed(c, s_plus, ctx))
        throw std::logic_error("achievers_relaxed: condition does not hold");
    AchieverSet out;
    detail::achievers_true(c, s_plus, ctx, out);
    return out;
}

/// Default batched test: evaluates each condition with the plain relaxed
/// semantics. Used when a kind has no specialized implementation.
inline std::vector<TestOutcome> default_test(std::span<const Condition* const> conds,
                                             const RelaxedState& s_plus, const TestContext* inner) {
    std::vector<TestOutcome> out;
    for (const Condition* c : conds) {
        if (holds_relaxed(c, s_plus, inner))
            out.push_back({c, achievers_relaxed(c, s_plus, inner)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Actions

struct Effect {
    VarId var = -1;
    Value value;
};

struct Action {
    enum class Schema : uint8_t { Move, Pick, Place, Clean, Cook, Custom };

    Schema schema = Schema::Custom;
    int id = -1;  // dense index within the problem's action vector

    // Grounded parameters (unused fields are -1).
    int obj = -1;    // Pick/Place/Clean/Cook
    int pose = -1;   // Pick/Place: pose table index
    int grasp = -1;  // Pick/Place: grasp table index
    int q = -1;      // config index (Move origin, Pick/Place config)
    int q2 = -1;     // Move target config index

    std::vector<const Condition*> conds;
    std::array<Effect, 2> effects{};
    int num_effects = 0;
    float cost = 1.0f;
    std::string label;  // Custom actions only

    void add_effect(VarId v, Value x) { effects[num_effects++] = {v, x}; }
    std::span<const Effect> effect_span() const { return {effects.data(), size_t(num_effects)}; }
};

/// True iff every condition of `a` holds in `s`.
inline bool applicable(const Action& a, const State& s, const TestContext* ctx = nullptr) {
    for (const Condition* c : a.conds)
        if (!holds(c, s, ctx)) return false;
    return true;
}

/// Effects overwrite, all other variables copy over. Requires applicability.
inline State apply(const Action& a, const State& s, const TestContext* ctx = nullptr) {
    if (!applicable(a, s, ctx)) throw std::logic_error("apply: action not applicable");
    State out = s;
    for (const Effect& e : a.effect_span()) out[e.var] = e.value;
    return out;
}

// ---------------------------------------------------------------------------
// Problem

/// An EAS planning problem over canonical PPM variables or custom domains.
struct EASProblem {
    int num_objects = 0;
    State initial;
    std::vector<const Condition*> goal;
    std::vector<Action> actions;

    // Insertion-ordered value domain per variable; a value's dense id is its
    // position. Kept canonical for PPM problems (see sampler).
    std::vector<std::vector<Value>> domains;

    int num_vars() const { return static_cast<int>(domains.size()); }

    int domain_size(VarId v) const { return static_cast<int>(domains[v].size()); }

    int dense_value(VarId v, Value x) const {
        const auto& dom = domains[v];
        for (size_t i = 0; i < dom.size(); ++i)
            if (dom[i] == x) return static_cast<int>(i);
        return -1;
    }
};

inline bool goal_satisfied(const EASProblem& p, const State& s, const TestContext* ctx) {
    for (const Condition* c : p.goal)
        if (!holds(c, s, ctx)) return false;
    return true;
}

}  // namespace ffplan
