#pragma once
/**
 * @file
 * @brief Delete-relaxation heuristics over EAS problems: a generalized
 *  Dijkstra pass (compute_costs) yielding h_add / h_max, relaxed-plan
 *  extraction yielding h_ff, and helpful-action selection.
 *
 * Move actions form a quadratically large family whose conditions are
 * reachability tests, so the evaluator carries a dedicated path for them:
 * effect costs are produced exactly as the generic pass would, but the
 * bookkeeping entries of individual Move actions (their satisfied conditions
 * and costs) are materialized on demand during plan extraction. All the
 * quantities involved (effect costs, spanning-forest paths, edge achievers)
 * are immutable once created inside one evaluation, so the lazy values equal
 * the eagerly recorded ones.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "ffplan/crg.hpp"
#include "ffplan/eas.hpp"

namespace ffplan {

inline constexpr float kInf = std::numeric_limits<float>::infinity();

enum class Comb : uint8_t { Add, Max };

inline float add_comb(float acc, float x) { return acc + x; }
inline float max_comb(float acc, float x) { return std::max(acc, x); }

// ---------------------------------------------------------------------------
// ProblemIndex: static (per-discretization) indexing of an EAS problem.

class ProblemIndex {
public:
    const EASProblem* problem = nullptr;
    TestContext* tests = nullptr;
    CRG* crg = nullptr;           // non-null enables the Move fast path
    bool use_reachability = true;  // false: Reachable conditions are dropped

    // Condition registry. Simple conditions are deduplicated by (var, value),
    // composite/tested ones by pointer.
    std::vector<const Condition*> conds;
    std::vector<std::vector<int>> cond_consumers;  // cond -> action ids (-1 = goal)
    std::vector<std::vector<int>> var_triggers;    // var -> non-simple cond ids
    std::vector<std::vector<int>> or_cond_lookup;  // eff -> flat-Or cond ids with that leaf
    std::vector<int> goal_cond_ids;

    // Effects: dense ids var_offset[v] + dense(value).
    std::vector<int> var_offset;
    int num_effs = 0;

    std::vector<std::vector<int>> action_cond_ids;   // per action (generic only)
    std::vector<std::vector<int>> eff_consumers;     // eff -> generic actions with it
    std::vector<uint8_t> action_fast_move;           // bypasses generic bookkeeping
    std::vector<int> generic_actions;                // ids outside the fast path

    // Move fast path.
    std::vector<int> targets;         // distinct Move endpoints
    std::vector<uint8_t> is_target;   // by roadmap vertex
    std::unordered_map<uint64_t, int> move_pair;  // q * V + q' -> action id
    int nv_build = 0;                 // roadmap size when the index was built

    void build(const EASProblem& p, TestContext* tctx, CRG* c, bool reachability) {
        problem = &p;
        tests = tctx;
        crg = c;
        use_reachability = reachability;

        var_offset.assign(p.num_vars() + 1, 0);
        for (VarId v = 0; v < p.num_vars(); ++v)
            var_offset[v + 1] = var_offset[v] + int(p.domains[v].size());
        num_effs = var_offset.back();
        dense_.assign(p.num_vars(), {});
        for (VarId v = 0; v < p.num_vars(); ++v)
            for (size_t i = 0; i < p.domains[v].size(); ++i)
                dense_[v].emplace(p.domains[v][i].bits, int(i));

        simple_lookup_.assign(num_effs, -1);
        or_cond_lookup.assign(num_effs, {});
        eff_consumers.assign(num_effs, {});
        var_triggers.assign(p.num_vars(), {});
        action_cond_ids.assign(p.actions.size(), {});
        action_fast_move.assign(p.actions.size(), 0);

        int nv = crg ? crg->roadmap.num_vertices() : 0;
        nv_build = nv;
        is_target.assign(nv, 0);
        targets.clear();
        move_pair.clear();
        generic_actions.clear();

        for (const Action& a : p.actions) {
            if (is_fast_move(a)) {
                action_fast_move[a.id] = 1;
                move_pair.emplace(uint64_t(a.q) * uint64_t(nv) + uint64_t(a.q2), a.id);
                if (!is_target[a.q]) {
                    is_target[a.q] = 1;
                    targets.push_back(a.q);
                }
                if (!is_target[a.q2]) {
                    is_target[a.q2] = 1;
                    targets.push_back(a.q2);
                }
                continue;
            }
            generic_actions.push_back(a.id);
            for (const Condition* cd : a.conds) {
                if (dropped(cd)) continue;
                action_cond_ids[a.id].push_back(register_cond(cd, a.id));
            }
            for (const Effect& e : a.effect_span()) eff_consumers[eff_id(e.var, e.value)].push_back(a.id);
        }
        for (const Condition* cd : p.goal) {
            if (dropped(cd)) continue;
            goal_cond_ids.push_back(register_cond(cd, kGoalConsumer));
        }
    }

    int eff_id(VarId v, Value x) const { return var_offset[v] + dense_.at(size_t(v)).at(x.bits); }
    std::pair<VarId, Value> eff_decode(int e) const {
        VarId v = int(std::upper_bound(var_offset.begin(), var_offset.end(), e) -
                      var_offset.begin()) - 1;
        return {v, problem->domains[v][e - var_offset[v]]};
    }

    int simple_cond_at(int eff) const { return simple_lookup_[eff]; }
    static constexpr int kGoalConsumer = -1;

private:
    bool dropped(const Condition* cd) const {
        return !use_reachability && cd->type == Condition::Type::Tested &&
               cd->tkind == TestKind::Reachable;
    }

    bool is_fast_move(const Action& a) const {
        if (!crg || !use_reachability || a.schema != Action::Schema::Move) return false;
        return a.conds.size() == 2 && a.conds[0]->type == Condition::Type::Simple &&
               a.conds[0]->var == kVarRobot && a.conds[1]->type == Condition::Type::Tested &&
               a.conds[1]->tkind == TestKind::Reachable && a.num_effects == 1;
    }

    int register_cond(const Condition* cd, int consumer) {
        int id;
        if (cd->type == Condition::Type::Simple) {
            int e = eff_id(cd->var, cd->value);
            if (simple_lookup_[e] >= 0) {
                id = simple_lookup_[e];
            } else {
                id = new_cond(cd);
                simple_lookup_[e] = id;
            }
        } else {
            auto it = by_ptr_.find(cd);
            if (it != by_ptr_.end()) {
                id = it->second;
            } else {
                id = new_cond(cd);
                by_ptr_.emplace(cd, id);
                std::vector<std::pair<VarId, Value>> leaves;
                if (flat_or_leaves(cd, leaves)) {
                    // Disjunctions of simple atoms (e.g. placement clearance)
                    // are indexed by leaf effect: the first popped leaf
                    // satisfies the condition with itself as achiever,
                    // avoiding any formula re-evaluation.
                    for (auto [v, x] : leaves) or_cond_lookup[eff_id(v, x)].push_back(id);
                } else {
                    std::vector<VarId> vars;
                    mentioned_vars(cd, vars);
                    std::sort(vars.begin(), vars.end());
                    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
                    for (VarId v : vars) var_triggers[v].push_back(id);
                }
            }
        }
        cond_consumers[id].push_back(consumer);
        return id;
    }

    int new_cond(const Condition* cd) {
        conds.push_back(cd);
        cond_consumers.emplace_back();
        return int(conds.size()) - 1;
    }

    static bool flat_or_leaves(const Condition* cd, std::vector<std::pair<VarId, Value>>& out) {
        if (cd->type == Condition::Type::Simple) {
            out.emplace_back(cd->var, cd->value);
            return true;
        }
        if (cd->type != Condition::Type::Or) return false;
        return flat_or_leaves(cd->lhs, out) && flat_or_leaves(cd->rhs, out);
    }

    void mentioned_vars(const Condition* cd, std::vector<VarId>& out) const {
        switch (cd->type) {
            case Condition::Type::Simple:
                out.push_back(cd->var);
                return;
            case Condition::Type::Tested:
                if (cd->tkind == TestKind::InReg) {
                    out.push_back(var_pose(cd->obj));
                } else {
                    // Reachable truth depends on the hand and every placement.
                    out.push_back(kVarHand);
                    for (int o = 0; o < problem->num_objects; ++o) out.push_back(var_pose(o));
                }
                return;
            default:
                mentioned_vars(cd->lhs, out);
                if (cd->rhs) mentioned_vars(cd->rhs, out);
        }
    }

    std::vector<std::unordered_map<uint32_t, int>> dense_;
    std::vector<int> simple_lookup_;  // eff -> simple cond id
    std::unordered_map<const Condition*, int> by_ptr_;
};

// ---------------------------------------------------------------------------
// CostTables: epoch-stamped per-evaluation storage (structure-of-arrays over
// effect, condition and action nodes), reused across evaluations.

struct CostTables {
    uint32_t epoch = 0;

    // effects
    std::vector<uint32_t> eff_seen, eff_popped;
    std::vector<float> eff_cost;
    std::vector<int> eff_best_action;  // backpointer: action of the cheapest push

    // conditions
    std::vector<uint32_t> cond_sat;
    std::vector<std::pair<int, int>> cond_ach;  // arena slice (offset, len)
    std::vector<std::pair<VarId, Value>> arena;

    // actions
    std::vector<uint32_t> act_seen, act_reached;
    std::vector<int> act_remaining;
    std::vector<float> act_cost;

    void ensure(const ProblemIndex& idx) {
        size_t ne = size_t(idx.num_effs), nc = idx.conds.size(),
               na = idx.problem->actions.size();
        if (eff_seen.size() < ne) {
            eff_seen.resize(ne, 0);
            eff_popped.resize(ne, 0);
            eff_cost.resize(ne, kInf);
            eff_best_action.resize(ne, -1);
        }
        if (cond_sat.size() < nc) {
            cond_sat.resize(nc, 0);
            cond_ach.resize(nc);
        }
        if (act_seen.size() < na) {
            act_seen.resize(na, 0);
            act_reached.resize(na, 0);
            act_remaining.resize(na, 0);
            act_cost.resize(na, kInf);
        }
    }

    bool popped(int e) const { return eff_popped[e] == epoch; }
    bool satisfied(int c) const { return cond_sat[c] == epoch; }
    bool reached(int a) const { return act_reached[a] == epoch; }
};

struct HeurStats {
    long evals = 0;
    long pops = 0;
    long pushes = 0;
    long actions_processed = 0;
    long move_candidates = 0;
};

// ---------------------------------------------------------------------------
// RelaxEval: one reusable evaluator bound to a ProblemIndex.

class RelaxEval {
public:
    explicit RelaxEval(const ProblemIndex& idx) : idx_(&idx) {}

    /// Fig-9-style generalized Dijkstra over effects/conditions/actions.
    /// Terminates as soon as every goal condition is satisfied. Returns true
    /// iff the goal became relaxed-reachable.
    bool compute_costs(const State& s, Comb comb) {
        const EASProblem& p = *idx_->problem;
        comb_ = comb;
        ++stats.evals;
        t_.epoch++;
        t_.ensure(*idx_);
        heap_.clear();
        seq_ = 0;
        t_.arena.clear();
        if (record_pops) pop_log.clear();
        goal_remaining_ = int(idx_->goal_cond_ids.size());
        goal_reached_ = goal_remaining_ == 0;

        // Relaxed state buffer.
        s_plus_.sets.assign(size_t(p.num_vars()), {});

        // Fast-path setup.
        fast_ = idx_->crg != nullptr && idx_->use_reachability && !idx_->move_pair.empty();
        if (fast_) {
            reach_ = std::make_unique<ReachContext>(*idx_->crg, /*track_achievers=*/true);
            reach_->attach(&s_plus_);
            int nv = idx_->crg->roadmap.num_vertices();
            popped_by_root_.assign(size_t(nv), {});
            unreached_by_root_.assign(size_t(nv), {});
            target_state_.assign(size_t(nv), 0);
            move_cost_.assign(size_t(nv), 0.0f);
            bfs_mark_.assign(size_t(nv), 0);
            bfs_epoch_ = 0;
            reach_->on_merge = [this](int absorbed, int survivor, int abs_ep, int surv_ep,
                                      int e) { merge_roots(absorbed, survivor, abs_ep, surv_ep, e); };
            best_src_.assign(size_t(nv), kInf);
            best_src_q_.assign(size_t(nv), -1);
            reach_->on_explore = [this](int v) {
                if (v < int(idx_->is_target.size()) && idx_->is_target[v] && target_state_[v] == 0) {
                    target_state_[v] = 1;  // unreached, in a component
                    int r = reach_->root(v);
                    unreached_by_root_[r].push_back(v);
                    if (best_src_[size_t(r)] < kInf) push_move(best_src_q_[size_t(r)], v);
                }
            };
        } else {
            reach_.reset();
        }

        // Generic zero-condition actions fire immediately; others arm counters.
        for (int aid : idx_->generic_actions) {
            const Action& a = p.actions[size_t(aid)];
            t_.act_seen[aid] = t_.epoch;
            t_.act_remaining[aid] = int(idx_->action_cond_ids[aid].size());
            if (t_.act_remaining[aid] == 0) process_action(a);
        }

        // Seed: current state's effects at cost zero.
        for (VarId v = 0; v < p.num_vars(); ++v) push(eff(v, s(v)), 0.0f, -2);

        while (!heap_.empty() && !goal_reached_) {
            auto [cost, sq, e] = pop_heap();
            if (t_.popped(e)) continue;
            t_.eff_popped[e] = t_.epoch;
            t_.eff_cost[e] = cost;
            ++stats.pops;
            if (record_pops) pop_log.push_back({e, cost});
            auto [v, x] = idx_->eff_decode(e);
            s_plus_.add(v, x);
            on_popped(v, x, e);
        }
        return goal_reached_;
    }

    float goal_cost() const {
        if (!goal_reached_) return kInf;
        float acc = 0;
        for (int c : idx_->goal_cond_ids) acc = combine(acc, cond_achiever_cost(c));
        return acc;
    }

    float eff_cost(VarId v, Value x) const {
        int e = eff(v, x);
        return t_.popped(e) ? t_.eff_cost[e] : kInf;
    }

    bool cond_satisfied(const Condition* cd) const {
        for (size_t i = 0; i < idx_->conds.size(); ++i)
            if (idx_->conds[i] == cd) return t_.satisfied(int(i));
        return false;
    }

    /// Action cost under the last evaluation; lazily computed for Moves.
    float act_cost(const Action& a) const {
        if (idx_->action_fast_move[a.id]) {
            if (!fast_ || !config_popped(a.q) || !reach_->connected(a.q, a.q2)) return kInf;
            return move_comb_cost(a.q, a.q2);
        }
        return t_.reached(a.id) ? t_.act_cost[a.id] : kInf;
    }

    /// Fig-10-style relaxed-plan extraction from the last (goal-reaching)
    /// compute_costs pass. Actions come back in execution order.
    std::vector<const Action*> extract_relaxed_plan() {
        if (!goal_reached_) throw std::logic_error("extract_relaxed_plan: goal not reached");
        const EASProblem& p = *idx_->problem;
        in_goals_.assign(size_t(idx_->num_effs), 0);
        goal_heap_.clear();
        gseq_ = 0;
        std::vector<const Action*> plan;

        for (int c : idx_->goal_cond_ids) queue_achievers(c);

        while (!goal_heap_.empty()) {
            std::pop_heap(goal_heap_.begin(), goal_heap_.end());
            auto [cost, sq, e] = goal_heap_.back();
            goal_heap_.pop_back();
            const Action* best = nullptr;
            float best_easiest = kInf;
            auto consider = [&](const Action& a) {
                float ac = act_cost(a);
                if (!(std::fabs(ac + a.cost - (-cost)) < 1e-6f)) return;
                float ez = easiest(a);
                if (ez < best_easiest) {
                    best_easiest = ez;
                    best = &a;
                }
            };
            for (int aid : idx_->eff_consumers[size_t(e)])
                if (t_.reached(aid)) consider(p.actions[aid]);
            if (fast_) {
                auto [v, x] = idx_->eff_decode(e);
                if (v == kVarRobot && x.kind() == Value::Kind::Config) {
                    int q2 = x.index();
                    if (reach_->explored(q2))
                        for (int q : popped_by_root_[reach_->root(q2)])
                            if (q != q2)
                                if (const Action* mv = find_move(q, q2)) consider(*mv);
                }
            }
            if (!best) {
                // Re-anchoring after a tree merge can shift move costs
                // between push and extraction; the action that actually
                // pushed this effect is always a valid achiever.
                int aid = t_.eff_best_action[size_t(e)];
                if (aid >= 0 && idx_->action_fast_move[size_t(aid)])
                    best = &p.actions[size_t(aid)];
            }
            if (!best) throw std::logic_error("extract_relaxed_plan: no achieving action");
            plan.push_back(best);
            for_each_cond_achiever(*best, [&](VarId v, Value x) {
                int e2 = eff(v, x);
                if (in_goals_[e2]) return;
                in_goals_[e2] = 1;
                if (t_.eff_cost[e2] > 0) push_goal(e2, t_.eff_cost[e2]);
            });
        }
        std::reverse(plan.begin(), plan.end());
        return plan;
    }

    /// First actions of the relaxed plan (already performable, i.e. action
    /// cost zero) followed by the remaining first-layer goal achievers.
    std::vector<const Action*> helpful_actions(const std::vector<const Action*>& plan) {
        std::vector<const Action*> out;
        auto add = [&](const Action* a) {
            if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
        };
        for (const Action* a : plan)
            if (act_cost(*a) == 0.0f) add(a);
        // Achievers of first-layer subgoals: any zero-cost action whose
        // effect is a queued goal at depth one.
        const EASProblem& p = *idx_->problem;
        for (int e = 0; e < idx_->num_effs; ++e) {
            if (!in_goals_[size_t(e)] || !t_.popped(e)) continue;
            for (int aid : idx_->eff_consumers[size_t(e)]) {
                const Action& a = p.actions[aid];
                if (t_.reached(aid) && t_.act_cost[aid] == 0.0f &&
                    std::fabs(a.cost - t_.eff_cost[e]) < 1e-6f)
                    add(&a);
            }
            auto [v, x] = idx_->eff_decode(e);
            if (fast_ && v == kVarRobot && x.kind() == Value::Kind::Config &&
                t_.eff_cost[e] > 0 && reach_->explored(x.index())) {
                int q2 = x.index();
                for (int q : popped_by_root_[reach_->root(q2)]) {
                    if (q == q2) continue;
                    const Action* mv = find_move(q, q2);
                    if (mv && move_comb_cost(q, q2) == 0.0f &&
                        std::fabs(mv->cost - t_.eff_cost[e]) < 1e-6f)
                        add(mv);
                }
            }
        }
        return out;
    }

    const CostTables& tables() const { return t_; }
    const RelaxedState& relaxed_state() const { return s_plus_; }
    bool goal_reached() const { return goal_reached_; }

    HeurStats stats;
    bool record_pops = false;
    std::vector<std::pair<int, float>> pop_log;  // (eff, cost) in pop order

private:
    struct HeapEntry {
        float cost;
        int64_t seq;
        int eff;
        // Min-heap by (cost, seq): std::push_heap builds a max-heap, so
        // invert. For the goal heap cost is negated (max by cost, FIFO tie).
        bool operator<(const HeapEntry& o) const {
            if (cost != o.cost) return cost > o.cost;
            return seq > o.seq;
        }
    };

    int eff(VarId v, Value x) const { return idx_->eff_id(v, x); }

    float combine(float a, float b) const {
        return comb_ == Comb::Add ? add_comb(a, b) : max_comb(a, b);
    }

    void push(int e, float cost, int action) {
        if (t_.popped(e)) return;
        if (t_.eff_seen[e] == t_.epoch && t_.eff_cost[e] <= cost) return;
        t_.eff_seen[e] = t_.epoch;
        t_.eff_cost[e] = cost;  // best pending cost; finalized at pop
        t_.eff_best_action[e] = action;
        heap_.push_back({cost, seq_++, e});
        std::push_heap(heap_.begin(), heap_.end());
        ++stats.pushes;
    }

    HeapEntry pop_heap() {
        std::pop_heap(heap_.begin(), heap_.end());
        HeapEntry top = heap_.back();
        heap_.pop_back();
        return top;
    }

    void on_popped(VarId v, Value x, int e) {
        // Fast path: reachability growth and Move generation.
        if (fast_) {
            if (v == kVarHand || is_pose_var(v)) {
                reach_->on_value_added(v, x);
                reach_->drain();
                if (goal_reached_) return;
            } else if (v == kVarRobot && x.kind() == Value::Kind::Config) {
                int q = x.index();
                if (!reach_->explored(q)) {
                    reach_->add_root(q);
                    reach_->drain();
                }
                int r = reach_->root(q);
                if (q < int(target_state_.size()) && target_state_[q] == 1) {
                    target_state_[q] = 2;  // reached
                }
                // Only the cheapest popped source per component can improve
                // pending Move pushes; dominated sources are skipped.
                float cand = combine(t_.eff_cost[size_t(e)], move_cost_[size_t(q)]);
                if (cand < best_src_[size_t(r)]) {
                    best_src_[size_t(r)] = cand;
                    best_src_q_[size_t(r)] = q;
                    for (int q2 : unreached_by_root_[r]) push_move(q, q2);
                }
                popped_by_root_[r].push_back(q);
                if (goal_reached_) return;
            }
        }

        // Simple condition on exactly this value.
        int sc = idx_->simple_cond_at(e);
        if (sc >= 0 && !t_.satisfied(sc)) {
            int off = int(t_.arena.size());
            t_.arena.push_back({v, x});
            satisfy(sc, {off, 1});
            if (goal_reached_) return;
        }

        // Flat disjunctions containing this value as a leaf.
        for (int c : idx_->or_cond_lookup[size_t(e)]) {
            if (t_.satisfied(c)) continue;
            int off = int(t_.arena.size());
            t_.arena.push_back({v, x});
            satisfy(c, {off, 1});
            if (goal_reached_) return;
        }

        // Formula/tested conditions mentioning this variable.
        dirty_simple_.clear();
        dirty_tested_.clear();
        for (int c : idx_->var_triggers[v]) {
            if (t_.satisfied(c)) continue;
            if (idx_->conds[size_t(c)]->type == Condition::Type::Tested)
                dirty_tested_.push_back(c);
            else
                dirty_simple_.push_back(c);
        }
        for (int c : dirty_simple_) {
            const Condition* cd = idx_->conds[size_t(c)];
            if (!holds_relaxed(cd, s_plus_, idx_->tests)) continue;
            AchieverSet ach = achievers_relaxed(cd, s_plus_, idx_->tests);
            satisfy(c, store(ach));
            if (goal_reached_) return;
        }
        run_tested(dirty_tested_);
    }

    void run_tested(const std::vector<int>& dirty) {
        if (dirty.empty()) return;
        // Batch by kind; Reachable additionally by shared start config.
        for (int kind = 0; kind < kNumTestKinds && !goal_reached_; ++kind) {
            batch_.clear();
            batch_ids_.clear();
            for (int c : dirty) {
                const Condition* cd = idx_->conds[size_t(c)];
                if (int(cd->tkind) != kind) continue;
                batch_.push_back(cd);
                batch_ids_.push_back(c);
            }
            if (batch_.empty()) continue;
            if (TestKind(kind) == TestKind::Reachable) {
                // Split into runs sharing q_from (a precondition of the test).
                while (!batch_.empty() && !goal_reached_) {
                    int q0 = batch_.front()->q_from;
                    sub_.clear();
                    sub_ids_.clear();
                    size_t keep = 0;
                    for (size_t j = 0; j < batch_.size(); ++j) {
                        if (batch_[j]->q_from == q0) {
                            sub_.push_back(batch_[j]);
                            sub_ids_.push_back(batch_ids_[j]);
                        } else {
                            batch_[keep] = batch_[j];
                            batch_ids_[keep] = batch_ids_[j];
                            ++keep;
                        }
                    }
                    batch_.resize(keep);
                    batch_ids_.resize(keep);
                    apply_outcomes(idx_->tests->run(TestKind::Reachable, sub_, s_plus_), sub_,
                                   sub_ids_);
                }
            } else {
                apply_outcomes(idx_->tests->run(TestKind(kind), batch_, s_plus_), batch_,
                               batch_ids_);
            }
        }
    }

    void apply_outcomes(const std::vector<TestOutcome>& outs,
                        const std::vector<const Condition*>& asked, const std::vector<int>& ids) {
        for (const TestOutcome& o : outs) {
            if (goal_reached_) return;
            for (size_t i = 0; i < asked.size(); ++i) {
                if (asked[i] == o.cond && !t_.satisfied(ids[i])) {
                    satisfy(ids[i], store(o.achievers));
                    break;
                }
            }
        }
    }

    std::pair<int, int> store(const AchieverSet& ach) {
        int off = int(t_.arena.size());
        for (auto [v, x] : ach.assignments) t_.arena.push_back({v, x});
        return {off, int(ach.assignments.size())};
    }

    void satisfy(int c, std::pair<int, int> slice) {
        t_.cond_sat[c] = t_.epoch;
        t_.cond_ach[c] = slice;
        for (int consumer : idx_->cond_consumers[size_t(c)]) {
            if (consumer == ProblemIndex::kGoalConsumer) {
                if (--goal_remaining_ == 0) goal_reached_ = true;
            } else if (--t_.act_remaining[consumer] == 0) {
                process_action(idx_->problem->actions[size_t(consumer)]);
            }
        }
    }

    void process_action(const Action& a) {
        float cost = 0;
        for (int c : idx_->action_cond_ids[a.id]) cost = combine(cost, cond_achiever_cost(c));
        t_.act_reached[a.id] = t_.epoch;
        t_.act_cost[a.id] = cost;
        ++stats.actions_processed;
        for (const Effect& e : a.effect_span()) push(eff(e.var, e.value), cost + a.cost, a.id);
    }

    float cond_achiever_cost(int c) const {
        auto [off, len] = t_.cond_ach[c];
        float acc = 0;
        for (int i = 0; i < len; ++i) {
            auto [v, x] = t_.arena[size_t(off + i)];
            acc = combine(acc, t_.eff_cost[size_t(eff(v, x))]);
        }
        return acc;
    }

    // --- Move fast path -----------------------------------------------------

    uint64_t move_key(int q, int q2) const {
        return uint64_t(q) * uint64_t(idx_->nv_build) + uint64_t(q2);
    }

    const Action* find_move(int q, int q2) const {
        auto it = idx_->move_pair.find(move_key(q, q2));
        return it == idx_->move_pair.end() ? nullptr : &idx_->problem->actions[size_t(it->second)];
    }

    bool config_popped(int q) const { return t_.popped(eff(kVarRobot, Value::config(q))); }

    /// Cost of the reachability evidence for a Move q -> q2, using the
    /// spanning-forest paths from both endpoints to their (shared) tree
    /// anchor. The concatenation q -> anchor -> q2 is itself a valid
    /// certificate path, so combining the two per-vertex aggregates yields a
    /// legitimate relaxed cost in O(1).
    float move_comb_cost(int q, int q2) const {
        float acc = t_.eff_cost[size_t(eff(kVarRobot, Value::config(q)))];
        if (comb_ == Comb::Add) return acc + move_cost_[size_t(q)] + move_cost_[size_t(q2)];
        return std::max(acc, std::max(move_cost_[size_t(q)], move_cost_[size_t(q2)]));
    }

    /// Combined popped-effect cost of one forest edge's achiever set.
    float edge_ach_cost(int e) const {
        float acc = 0;
        for (auto [v, x] : reach_->edge_achievers(e).assignments)
            acc = comb_ == Comb::Add ? acc + t_.eff_cost[size_t(eff(v, x))]
                                     : std::max(acc, t_.eff_cost[size_t(eff(v, x))]);
        return acc;
    }

    void push_move(int q, int q2) {
        const Action* a = find_move(q, q2);
        if (!a) return;
        int e = eff(kVarRobot, Value::config(q2));
        if (t_.popped(e)) return;
        ++stats.move_candidates;
        push(e, move_comb_cost(q, q2) + a->cost, a->id);
    }

    void merge_roots(int absorbed, int survivor, int abs_ep, int surv_ep, int edge) {
        // Re-anchor the absorbed (smaller) tree's aggregated reachability
        // costs through the new edge: its vertices now route to the
        // survivor's anchor via abs_ep -> edge -> surv_ep.
        ++bfs_epoch_;
        bfs_queue_.clear();
        bfs_queue_.push_back(abs_ep);
        bfs_mark_[size_t(abs_ep)] = bfs_epoch_;
        move_cost_[size_t(abs_ep)] =
            combine(edge_ach_cost(edge), move_cost_[size_t(surv_ep)]);
        for (size_t i = 0; i < bfs_queue_.size(); ++i) {
            int cur = bfs_queue_[i];
            for (auto [e2, w] : reach_->tree_adj(cur)) {
                if (e2 == edge || bfs_mark_[size_t(w)] == bfs_epoch_) continue;
                bfs_mark_[size_t(w)] = bfs_epoch_;
                move_cost_[size_t(w)] = combine(move_cost_[size_t(cur)], edge_ach_cost(e2));
                bfs_queue_.push_back(w);
            }
        }

        auto& pa = popped_by_root_[absorbed];
        auto& pb = popped_by_root_[survivor];
        auto& ua = unreached_by_root_[absorbed];
        auto& ub = unreached_by_root_[survivor];

        // Re-anchoring changed the absorbed side's per-vertex costs, so its
        // best source must be recomputed; the merged component's best source
        // is the cheaper of the two sides.
        float abs_best = kInf;
        int abs_q = -1;
        for (int q : pa) {
            float cand = combine(t_.eff_cost[size_t(eff(kVarRobot, Value::config(q)))],
                                 move_cost_[size_t(q)]);
            if (cand < abs_best) {
                abs_best = cand;
                abs_q = q;
            }
        }
        float surv_best = best_src_[size_t(survivor)];
        if (abs_best < surv_best) {
            // The absorbed side brought a cheaper source: survivor-side
            // pending targets may improve.
            best_src_[size_t(survivor)] = abs_best;
            best_src_q_[size_t(survivor)] = abs_q;
            for (int q2 : ub)
                if (target_state_[q2] == 1) push_move(abs_q, q2);
        }
        // Absorbed-side pending targets are now fed from the merged best
        // source (their own aggregates changed too, so always refresh).
        int bq = best_src_q_[size_t(survivor)];
        if (bq >= 0)
            for (int q2 : ua)
                if (target_state_[q2] == 1) push_move(bq, q2);

        pb.insert(pb.end(), pa.begin(), pa.end());
        pa.clear();
        ub.insert(ub.end(), ua.begin(), ua.end());
        ua.clear();
    }

    // --- extraction helpers --------------------------------------------------

    void queue_achievers(int c) {
        auto [off, len] = t_.cond_ach[c];
        for (int i = 0; i < len; ++i) {
            auto [v, x] = t_.arena[size_t(off + i)];
            int e = eff(v, x);
            if (in_goals_[size_t(e)]) continue;
            in_goals_[size_t(e)] = 1;
            if (t_.eff_cost[size_t(e)] > 0) push_goal(e, t_.eff_cost[size_t(e)]);
        }
    }

    void push_goal(int e, float cost) {
        goal_heap_.push_back({-cost, gseq_++, e});
        std::push_heap(goal_heap_.begin(), goal_heap_.end());
    }

    template <typename F>
    void for_each_cond_achiever(const Action& a, F&& f) {
        if (idx_->action_fast_move[a.id]) {
            f(kVarRobot, Value::config(a.q));
            scratch_ach_.assignments.clear();
            reach_->trace_into(a.q, a.q2, scratch_ach_);
            for (auto [v, x] : scratch_ach_.assignments) f(v, x);
            return;
        }
        for (int c : idx_->action_cond_ids[a.id]) {
            auto [off, len] = t_.cond_ach[c];
            for (int i = 0; i < len; ++i) f(t_.arena[size_t(off + i)].first,
                                            t_.arena[size_t(off + i)].second);
        }
    }

    /// Sum of achiever costs not yet queued as goals (ties in A_e break
    /// toward actions whose remaining preconditions are cheapest).
    float easiest(const Action& a) {
        float acc = 0;
        for_each_cond_achiever(a, [&](VarId v, Value x) {
            int e = eff(v, x);
            if (!in_goals_[size_t(e)]) acc += t_.eff_cost[size_t(e)];
        });
        return acc;
    }

    const ProblemIndex* idx_;
    CostTables t_;
    Comb comb_ = Comb::Add;
    RelaxedState s_plus_;
    std::vector<HeapEntry> heap_;
    int64_t seq_ = 0;
    int goal_remaining_ = 0;
    bool goal_reached_ = false;
    bool fast_ = false;

    std::unique_ptr<ReachContext> reach_;
    std::vector<std::vector<int>> popped_by_root_, unreached_by_root_;
    std::vector<uint8_t> target_state_;  // 0 unseen, 1 unreached, 2 reached
    std::vector<float> move_cost_;       // explored vertex -> aggregated path cost to anchor
    std::vector<float> best_src_;        // root -> cheapest popped source aggregate
    std::vector<int> best_src_q_;        // root -> argmin vertex of best_src_
    std::vector<int> bfs_mark_, bfs_queue_;
    int bfs_epoch_ = 0;
    mutable AchieverSet scratch_ach_;

    std::vector<int> dirty_simple_, dirty_tested_;
    std::vector<const Condition*> batch_, sub_;
    std::vector<int> batch_ids_, sub_ids_;

    std::vector<HeapEntry> goal_heap_;
    int64_t gseq_ = 0;
    std::vector<uint8_t> in_goals_;
};

// ---------------------------------------------------------------------------
// Heuristic entry points.

inline float h_zero(const State&) { return 0.0f; }

inline float unsatisfied_goals(const EASProblem& p, const State& s, const TestContext* ctx) {
    float n = 0;
    for (const Condition* c : p.goal)
        if (!holds(c, s, ctx)) n += 1;
    return n;
}

inline float h_add(RelaxEval& ev, const State& s) {
    return ev.compute_costs(s, Comb::Add) ? ev.goal_cost() : kInf;
}

inline float h_max(RelaxEval& ev, const State& s) {
    return ev.compute_costs(s, Comb::Max) ? ev.goal_cost() : kInf;
}

/// h_ff: total cost of an extracted relaxed plan (FF-style ordering uses the
/// additive combination for the cost pass).
inline float h_ff(RelaxEval& ev, const State& s,
                  std::vector<const Action*>* plan_out = nullptr) {
    if (!ev.compute_costs(s, Comb::Add)) return kInf;
    std::vector<const Action*> plan = ev.extract_relaxed_plan();
    float total = 0;
    for (const Action* a : plan) total += a->cost;
    if (plan_out) *plan_out = std::move(plan);
    return total;
}

}  // namespace ffplan
