#pragma once
/**
 * @file
 * @brief Weighted best-first search over EAS states with duplicate pruning
 *  and reopening, in an eager (bfs) and a deferred (dbfs) variant. Deferred
 *  evaluation computes the heuristic once per popped node and queues children
 *  with the parent's value, trading heuristic accuracy for far fewer
 *  evaluations.
 */

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ffplan/eas.hpp"
#include "ffplan/heur.hpp"

namespace ffplan {

enum class Strategy : uint8_t { BFS, DBFS };

struct SearchConfig {
    Strategy strategy = Strategy::BFS;
    double w = 0.8;  // f(n) = (1 - w) g(n) + w h(n), w in [0, 1]
    bool use_helpful = false;
    long max_expansions = -1;  // < 0: unbounded
    double max_seconds = -1;   // < 0: unbounded
};

struct SearchStats {
    long expansions = 0;
    long evaluations = 0;
    long generated = 0;
    long reopened = 0;
    long dead_ends = 0;
    bool out_of_budget = false;
};

struct HeuristicResult {
    float h = 0;
    std::vector<const Action*> helpful;  // empty: no pruning information
};

/// The search is generic over the transition system: goal test, applicable
/// actions, and (state, action) -> state are closures so tests can drive it
/// with arbitrary problems.
struct SearchSpace {
    std::function<bool(const State&)> is_goal;
    std::function<void(const State&, std::vector<const Action*>&)> successors;
    std::function<State(const State&, const Action&)> step;
    std::function<HeuristicResult(const State&)> heuristic;
};

struct SearchNode {
    State state;
    int parent = -1;
    const Action* via = nullptr;
    float g = 0;
    float h = 0;
    bool evaluated = false;                // dbfs: heuristic already computed
    std::vector<const Action*> helpful;    // bfs: stored at evaluation time
};

inline std::vector<const Action*> retrace_plan(const std::vector<SearchNode>& nodes, int leaf) {
    std::vector<const Action*> plan;
    for (int i = leaf; nodes[size_t(i)].parent >= 0; i = nodes[size_t(i)].parent)
        plan.push_back(nodes[size_t(i)].via);
    std::reverse(plan.begin(), plan.end());
    return plan;
}

inline std::optional<std::vector<const Action*>> search(const State& s0, const SearchSpace& space,
                                                        const SearchConfig& cfg,
                                                        SearchStats* stats_out = nullptr) {
    SearchStats stats;
    auto t0 = std::chrono::steady_clock::now();
    auto over_time = [&] {
        if (cfg.max_seconds < 0) return false;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
               cfg.max_seconds;
    };

    struct Open {
        float f;
        int64_t seq;
        int node;
        bool operator<(const Open& o) const {  // min-heap by (f, FIFO)
            if (f != o.f) return f > o.f;
            return seq > o.seq;
        }
    };

    std::vector<SearchNode> nodes;
    std::vector<Open> open;
    std::unordered_map<State, float, StateHash> best_g;
    int64_t seq = 0;
    auto fval = [&](float g, float h) { return float((1.0 - cfg.w) * g + cfg.w * h); };
    auto push = [&](int n) {
        open.push_back({fval(nodes[size_t(n)].g, nodes[size_t(n)].h), seq++, n});
        std::push_heap(open.begin(), open.end());
    };

    nodes.push_back({s0, -1, nullptr, 0, 0, false, {}});
    best_g.emplace(s0, 0.0f);
    if (cfg.strategy == Strategy::BFS) {
        HeuristicResult r = space.heuristic(s0);
        ++stats.evaluations;
        if (r.h == kInf) {
            if (stats_out) *stats_out = stats;
            return std::nullopt;
        }
        nodes[0].h = r.h;
        nodes[0].evaluated = true;
        nodes[0].helpful = std::move(r.helpful);
    }
    push(0);

    std::vector<const Action*> succ;
    while (!open.empty()) {
        if ((cfg.max_expansions >= 0 && stats.expansions >= cfg.max_expansions) || over_time()) {
            stats.out_of_budget = true;
            break;
        }
        std::pop_heap(open.begin(), open.end());
        int ni = open.back().node;
        open.pop_back();
        SearchNode& n = nodes[size_t(ni)];
        auto it = best_g.find(n.state);
        if (it != best_g.end() && n.g > it->second) continue;  // stale entry

        if (cfg.strategy == Strategy::DBFS && !n.evaluated) {
            HeuristicResult r = space.heuristic(n.state);
            ++stats.evaluations;
            n.evaluated = true;
            if (r.h == kInf) {
                ++stats.dead_ends;
                continue;
            }
            n.h = r.h;
            n.helpful = std::move(r.helpful);
        }
        if (space.is_goal(n.state)) {
            if (stats_out) *stats_out = stats;
            return retrace_plan(nodes, ni);
        }

        ++stats.expansions;
        succ.clear();
        if (cfg.use_helpful && !n.helpful.empty()) {
            succ = n.helpful;
        } else {
            space.successors(n.state, succ);
        }
        // Copy what we need before nodes reallocates.
        State parent_state = n.state;
        float parent_g = n.g, parent_h = n.h;

        for (const Action* a : succ) {
            State child = space.step(parent_state, *a);
            float g = parent_g + a->cost;
            auto [slot, fresh] = best_g.emplace(child, g);
            if (!fresh) {
                if (g >= slot->second) continue;
                slot->second = g;
                ++stats.reopened;
            }
            ++stats.generated;
            SearchNode cn;
            cn.state = std::move(child);
            cn.parent = ni;
            cn.via = a;
            cn.g = g;
            if (cfg.strategy == Strategy::BFS) {
                HeuristicResult r = space.heuristic(cn.state);
                ++stats.evaluations;
                if (r.h == kInf) {
                    ++stats.dead_ends;
                    continue;
                }
                cn.h = r.h;
                cn.evaluated = true;
                cn.helpful = std::move(r.helpful);
            } else {
                cn.h = parent_h;  // deferred: child inherits the parent's h
            }
            nodes.push_back(std::move(cn));
            push(int(nodes.size()) - 1);
        }
    }
    if (stats_out) *stats_out = stats;
    return std::nullopt;
}

}  // namespace ffplan
