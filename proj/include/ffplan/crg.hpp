#pragma once
/**
 * @file
 * @brief Conditional reachability graph: a roadmap whose edges carry lazily
 *  computed, permanently cached validity verdicts conditioned on one object
 *  placement and the held grasp. Reachability queries against relaxed states
 *  run on an incremental context that memoizes the reachable subgraph while
 *  the relaxed state grows.
 */

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ffplan/eas.hpp"

namespace ffplan {

// ---------------------------------------------------------------------------
// Roadmap

struct RoadmapEdge {
    int u = -1, v = -1;
    Segment traj;  // from vertex u to vertex v; validity is direction-free
};

struct Roadmap {
    std::vector<Vec2> vertices;
    std::vector<RoadmapEdge> edges;
    std::vector<std::vector<std::pair<int, int>>> adj;  // vertex -> (edge id, other vertex)

    int add_vertex(Vec2 q) {
        vertices.push_back(q);
        adj.emplace_back();
        return static_cast<int>(vertices.size()) - 1;
    }
    int add_edge(int u, int v) {
        int e = static_cast<int>(edges.size());
        edges.push_back({u, v, Segment{vertices[u], vertices[v]}});
        adj[u].push_back({e, v});
        adj[v].push_back({e, u});
        return e;
    }
    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
};

// ---------------------------------------------------------------------------
// CRG: roadmap + sampled pose/grasp tables + persistent validity caches.

struct CrgStats {
    long robot_obj_calls = 0;
    long robot_grasp_calls = 0;
    long grasp_obj_calls = 0;
    long duplicate_primitive_calls = 0;  // audit mode only
    long sweeps = 0;

    long collision_calls() const { return robot_obj_calls + robot_grasp_calls + grasp_obj_calls; }
};

class CRG {
public:
    Roadmap roadmap;
    const World* world = nullptr;

    // Sampled value tables. Value::pose(o, i) refers to poses[o][i];
    // Value::grasp(o, i) to grasp_offsets[o][i]; Value::config(i) to
    // roadmap.vertices[i]. Tables only grow across sampling iterations.
    std::vector<std::vector<Vec2>> poses;
    std::vector<std::vector<Vec2>> grasp_offsets;

    mutable CrgStats stats;
    bool audit_duplicates = false;

    void init(const World* w) {
        world = w;
        poses.assign(w->objects.size(), {});
        grasp_offsets.assign(w->objects.size(), {});
    }

    int num_objects() const { return static_cast<int>(poses.size()); }
    double object_radius(int o) const { return world->objects[o].radius; }
    Shape object_shape(int o) const { return Shape::disc(object_radius(o)); }
    Vec2 pose_coord(int o, int p) const { return poses[o][p]; }
    GraspTransform grasp(int o, int g) const { return GraspTransform{grasp_offsets[o][g]}; }

    // Global dense ids across objects, for flat cache indexing.
    int pose_gid(int o, int p) const {
        int base = 0;
        for (int i = 0; i < o; ++i) base += static_cast<int>(poses[i].size());
        return base + p;
    }

    /// e.valid[((o, p), None)]: robot traverses e while o is placed at p.
    bool edge_valid_robot_obj(int e, int o, int p) const {
        uint8_t& cell = dense_cell(ro_valid_, e, o, p, int(poses[size_t(o)].size()));
        if (cell) return cell == 1;
        ++stats.robot_obj_calls;
        note_primitive(cache_key(e, 0, o, p));
        bool ok = !robot_obj_c(roadmap.edges[e].traj, world->robot_radius, object_shape(o),
                               pose_coord(o, p));
        cell = ok ? 1 : 2;
        return ok;
    }

    /// e.valid[(None, (o', γ))]: robot traverses e holding o' at grasp g.
    bool edge_valid_robot_grasp(int e, int o2, int g) const {
        uint8_t& cell = dense_cell(rg_valid_, e, o2, g, int(grasp_offsets[size_t(o2)].size()));
        if (cell) return cell == 1;
        ++stats.robot_grasp_calls;
        note_primitive(cache_key(e, 1, o2, g));
        bool ok = !robot_grasp_c(roadmap.edges[e].traj, world->robot_radius, grasp(o2, g),
                                 object_shape(o2), *world);
        cell = ok ? 1 : 2;
        return ok;
    }

    /// e.valid[((o, p), (o', γ))]: stores only the held-object / placed-object
    /// interaction; the robot-vs-o and held-vs-fixed parts live in the
    /// ((o, p), None) and (None, (o', γ)) entries.
    bool edge_valid_grasp_obj(int e, int o, int p, int o2, int g) const {
        uint64_t key = pair_key(e, pose_gid(o, p), o2, g);
        auto it = valid_pair_.find(key);
        if (it != valid_pair_.end()) return it->second;
        ++stats.grasp_obj_calls;
        note_primitive(key | (1ull << 63));
        bool ok = !grasp_obj_c(roadmap.edges[e].traj, grasp(o2, g), object_shape(o2),
                               object_shape(o), pose_coord(o, p));
        valid_pair_.emplace(key, ok);
        return ok;
    }

    size_t cache_entries() const {
        size_t n = valid_pair_.size();
        for (const auto& v : ro_valid_) n += size_t(std::count_if(v.begin(), v.end(), [](uint8_t c) { return c != 0; }));
        for (const auto& v : rg_valid_) n += size_t(std::count_if(v.begin(), v.end(), [](uint8_t c) { return c != 0; }));
        return n;
    }

    /// Recomputes every cached entry directly; returns the number of
    /// mismatches (0 expected). Test support.
    int audit_cache() const {
        int bad = 0;
        int m = num_objects();
        for (size_t slot = 0; slot < ro_valid_.size(); ++slot) {
            int e = int(slot) / m, o = int(slot) % m;
            for (size_t idx = 0; idx < ro_valid_[slot].size(); ++idx) {
                uint8_t cell = ro_valid_[slot][idx];
                if (!cell) continue;
                bool direct = !robot_obj_c(roadmap.edges[e].traj, world->robot_radius,
                                           object_shape(o), pose_coord(o, int(idx)));
                if (direct != (cell == 1)) ++bad;
            }
        }
        for (size_t slot = 0; slot < rg_valid_.size(); ++slot) {
            int e = int(slot) / m, o = int(slot) % m;
            for (size_t idx = 0; idx < rg_valid_[slot].size(); ++idx) {
                uint8_t cell = rg_valid_[slot][idx];
                if (!cell) continue;
                bool direct = !robot_grasp_c(roadmap.edges[e].traj, world->robot_radius,
                                             grasp(o, int(idx)), object_shape(o), *world);
                if (direct != (cell == 1)) ++bad;
            }
        }
        for (const auto& [key, val] : valid_pair_) {
            int e = int(key >> 40);
            int pg = int((key >> 16) & 0xffffff);
            int o2 = int((key >> 8) & 0xff);
            int g = int(key & 0xff);
            int o = 0, p = pg;
            while (p >= int(poses[o].size())) p -= int(poses[o++].size());
            bool direct = !grasp_obj_c(roadmap.edges[e].traj, grasp(o2, g), object_shape(o2),
                                       object_shape(o), pose_coord(o, p));
            if (direct != val) ++bad;
        }
        return bad;
    }

private:
    // (None,(o,g)) and ((o,p),None) entries: edge << 32 | kind << 30 | obj << 21 | index
    static uint64_t cache_key(int e, int kind, int o, int idx) {
        return (uint64_t(e) << 32) | (uint64_t(kind) << 30) | (uint64_t(o) << 21) | uint64_t(idx);
    }
    // ((o,p),(o2,g)) entries: edge << 40 | pose_gid << 16 | o2 << 8 | g
    uint64_t pair_key(int e, int pgid, int o2, int g) const {
        return (uint64_t(e) << 40) | (uint64_t(pgid) << 16) | (uint64_t(o2) << 8) | uint64_t(g);
    }

    void note_primitive(uint64_t key) const {
        if (!audit_duplicates) return;
        if (!computed_keys_.insert(key).second) ++stats.duplicate_primitive_calls;
    }

    // Dense lazily-filled verdict cells: 0 unknown, 1 valid, 2 invalid.
    // Slot layout [e * num_objects + o]; inner index is pose / grasp id.
    uint8_t& dense_cell(std::vector<std::vector<uint8_t>>& table, int e, int o, int idx,
                        int width) const {
        size_t slot = size_t(e) * size_t(num_objects()) + size_t(o);
        if (table.size() <= slot)
            table.resize(size_t(roadmap.num_edges()) * size_t(num_objects()));
        auto& vec = table[slot];
        if (int(vec.size()) < width) vec.resize(size_t(width), 0);
        return vec[size_t(idx)];
    }
    mutable std::vector<std::vector<uint8_t>> ro_valid_;     // robot x placed object
    mutable std::vector<std::vector<uint8_t>> rg_valid_;     // robot x held grasp
    mutable std::unordered_map<uint64_t, bool> valid_pair_;  // placement x grasp entries
    mutable std::unordered_set<uint64_t> computed_keys_;
};

// ---------------------------------------------------------------------------
// Fig-19 edge tests against a relaxed state.

/// test-grasp: can the robot cross `e` for some held-grasp value in s+,
/// given placement ρ (none => against fixed obstacles only)?
/// On success appends the enabling (v_h, value) to `ach`.
inline bool test_grasp(const CRG& crg, const RelaxedState& s_plus, int e, int rho_obj, int rho_pose,
                       AchieverSet* ach) {
    const auto& hand = s_plus.values(kVarHand);
    for (const Value& g : hand) {
        if (g.is_none()) {
            if (ach) ach->add(kVarHand, g);
            return true;
        }
    }
    for (const Value& g : hand) {
        if (g.kind() != Value::Kind::Grasp) continue;
        bool ok = rho_obj < 0 ? crg.edge_valid_robot_grasp(e, g.obj(), g.index())
                              : crg.edge_valid_grasp_obj(e, rho_obj, rho_pose, g.obj(), g.index());
        if (ok) {
            if (ach) ach->add(kVarHand, g);
            return true;
        }
    }
    return false;
}

/// test-obj: can the robot cross `e` for some pose value of object `o` in s+?
inline bool test_obj(const CRG& crg, const RelaxedState& s_plus, int e, int o, AchieverSet* ach) {
    VarId v = var_pose(o);
    const auto& set = s_plus.values(v);
    for (const Value& p : set) {
        if (p.is_none()) {
            if (ach) ach->add(v, p);
            return true;
        }
    }
    for (const Value& p : set) {
        if (p.kind() != Value::Kind::PoseRef) continue;
        if (crg.edge_valid_robot_obj(e, o, p.index()) &&
            test_grasp(crg, s_plus, e, o, p.index(), ach)) {
            if (ach) ach->add(v, p);
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// ReachContext: lazily validated reachable subgraph for one (relaxed)
// planning problem. The relaxed state may only grow while attached; edge
// verdicts that failed are retried when a value set relevant to the failure
// grows. Components are tracked union-find style with a spanning forest for
// achiever tracing.

class ReachContext {
public:
    ReachContext(CRG& crg, bool track_achievers)
        : crg_(&crg), track_ach_(track_achievers) {
        resize();
    }

    void attach(const RelaxedState* s_plus) { s_plus_ = s_plus; }
    const RelaxedState* attached() const { return s_plus_; }

    /// Notification that value x was added to variable v's set.
    void on_value_added(VarId v, Value x) {
        (void)x;
        if (v == kVarHand) {
            for (auto& lst : blocked_by_var_) move_to_worklist(lst);
        } else if (is_pose_var(v)) {
            size_t idx = size_t(var_object(v));
            if (idx < blocked_by_var_.size()) move_to_worklist(blocked_by_var_[idx]);
        }
    }

    /// Ensures q's component is explored; returns its root after draining.
    void add_root(int q) {
        resize();
        explore(q);
    }

    /// Processes pending vertices and edge retries to a fixpoint.
    void drain() {
        resize();
        bool worked = !vertex_queue_.empty() || !worklist_.empty();
        while (!vertex_queue_.empty() || !worklist_.empty()) {
            while (!vertex_queue_.empty()) {
                int u = vertex_queue_.back();
                vertex_queue_.pop_back();
                for (auto [e, w] : crg_->roadmap.adj[u]) {
                    if (edge_state_[e] == kUnseen) {
                        edge_state_[e] = kQueued;
                        worklist_.push_back(e);
                    }
                }
            }
            while (!worklist_.empty()) {
                int e = worklist_.back();
                worklist_.pop_back();
                if (edge_state_[e] == kPassed) continue;
                try_edge(e);
                if (!vertex_queue_.empty()) break;  // explore newly reached vertices first
            }
        }
        if (worked) ++crg_->stats.sweeps;
    }

    bool explored(int q) const { return q < int(explored_.size()) && explored_[q]; }

    int root(int q) {
        int r = q;
        while (uf_parent_[r] != r) r = uf_parent_[r];
        while (uf_parent_[q] != r) {
            int next = uf_parent_[q];
            uf_parent_[q] = r;
            q = next;
        }
        return r;
    }

    bool connected(int q1, int q2) {
        return explored_[q1] && explored_[q2] && root(q1) == root(q2);
    }

    /// Union of e.ach over the spanning-forest path q1 -> q2.
    AchieverSet trace(int q1, int q2) {
        AchieverSet out;
        trace_into(q1, q2, out);
        return out;
    }

    void trace_into(int q1, int q2, AchieverSet& out) {
        if (q1 == q2) return;
        // BFS over the forest restricted to the shared component.
        std::vector<int>& prev = trace_prev_;
        prev.assign(crg_->roadmap.num_vertices(), -1);
        std::vector<int> queue{q1};
        prev[q1] = q1;
        for (size_t i = 0; i < queue.size() && prev[q2] < 0; ++i) {
            int u = queue[i];
            for (auto [e, w] : forest_[u]) {
                if (prev[w] >= 0) continue;
                prev[w] = u * (crg_->roadmap.num_edges() + 1) + e + 1;
                queue.push_back(w);
            }
        }
        if (prev[q2] < 0) throw std::logic_error("trace: vertices not connected");
        int cur = q2;
        while (cur != q1) {
            int enc = prev[cur];
            int u = enc / (crg_->roadmap.num_edges() + 1);
            int e = enc % (crg_->roadmap.num_edges() + 1) - 1;
            out.merge(edge_ach_[e]);
            cur = u;
        }
    }

    /// Batched Reachable evaluation per Fig 19: all conditions share a start
    /// configuration. Returns the reachable subset with traced achievers.
    std::vector<TestOutcome> query(std::span<const Condition* const> conds,
                                   const RelaxedState& s_plus) {
        attach(&s_plus);
        std::vector<TestOutcome> out;
        if (conds.empty()) return out;
        add_root(conds.front()->q_from);
        drain();
        for (const Condition* c : conds) {
            if (c->q_from != conds.front()->q_from)
                throw std::logic_error("test_reachable: mixed start configurations");
            if (connected(c->q_from, c->q_to)) {
                TestOutcome o;
                o.cond = c;
                if (track_ach_) o.achievers = trace(c->q_from, c->q_to);
                out.push_back(std::move(o));
            }
        }
        return out;
    }

    /// Invoked whenever two components merge: (absorbed root, surviving root).
    /// Called when two spanning trees join: (absorbed_root, survivor_root,
    /// endpoint in the absorbed tree, endpoint in the survivor tree, edge).
    std::function<void(int, int, int, int, int)> on_merge;
    /// Invoked when a vertex is first explored (it is its own root then).
    std::function<void(int)> on_explore;

    const AchieverSet& edge_achievers(int e) const { return edge_ach_[e]; }
    /// Spanning-forest adjacency of v: (edge id, other endpoint) pairs.
    const std::vector<std::pair<int, int>>& tree_adj(int v) const { return forest_[v]; }
    long edges_tried() const { return edges_tried_; }

private:
    enum : uint8_t { kUnseen = 0, kQueued = 1, kBlocked = 2, kPassed = 3 };

    void resize() {
        size_t nv = size_t(crg_->roadmap.num_vertices());
        size_t ne = size_t(crg_->roadmap.num_edges());
        if (explored_.size() < nv) {
            size_t old = explored_.size();
            explored_.resize(nv, 0);
            uf_parent_.resize(nv);
            for (size_t i = old; i < nv; ++i) uf_parent_[i] = int(i);
            forest_.resize(nv);
        }
        if (edge_state_.size() < ne) {
            edge_state_.resize(ne, kUnseen);
            if (track_ach_) edge_ach_.resize(ne);
            else edge_ach_.resize(ne);  // kept empty when not tracing
        }
        if (blocked_by_var_.size() < size_t(crg_->num_objects()) + 1)
            blocked_by_var_.resize(size_t(crg_->num_objects()) + 1);
    }

    void move_to_worklist(std::vector<int>& lst) {
        for (int e : lst) {
            if (edge_state_[e] == kBlocked) {
                edge_state_[e] = kQueued;
                worklist_.push_back(e);
            }
        }
        lst.clear();
    }

    void try_edge(int e) {
        ++edges_tried_;
        const RoadmapEdge& edge = crg_->roadmap.edges[e];
        AchieverSet scratch;
        AchieverSet* ach = track_ach_ ? &scratch : nullptr;
        if (!test_grasp(*crg_, *s_plus_, e, -1, -1, ach)) {
            block(e, crg_->num_objects());  // unblocked only by v_h growth
            return;
        }
        int m = crg_->num_objects();
        for (int o = 0; o < m; ++o) {
            if (!test_obj(*crg_, *s_plus_, e, o, ach)) {
                block(e, o);
                return;
            }
        }
        edge_state_[e] = kPassed;
        if (track_ach_) edge_ach_[e] = std::move(scratch);
        link(edge.u, edge.v, e);
    }

    void block(int e, int slot) {
        edge_state_[e] = kBlocked;
        blocked_by_var_[slot].push_back(e);
    }

    void explore(int x) {
        if (explored_[x]) return;
        explored_[x] = 1;
        vertex_queue_.push_back(x);
        if (on_explore) on_explore(x);
    }

    void link(int u, int v, int e) {
        explore(u);
        explore(v);
        int ru = root(u), rv = root(v);
        if (ru == rv) return;  // parallel edge within one component
        // Keep the larger tree's root; sizes tracked lazily via counts.
        int abs_ep = v, surv_ep = u;
        if (comp_size(ru) < comp_size(rv)) {
            std::swap(ru, rv);
            std::swap(abs_ep, surv_ep);
        }
        uf_parent_[rv] = ru;
        comp_size_[ru] = comp_size(ru) + comp_size(rv);
        forest_[u].push_back({e, v});
        forest_[v].push_back({e, u});
        if (on_merge) on_merge(rv, ru, abs_ep, surv_ep, e);
    }

    int comp_size(int r) {
        auto it = comp_size_.find(r);
        return it == comp_size_.end() ? 1 : it->second;
    }

    CRG* crg_;
    const RelaxedState* s_plus_ = nullptr;
    bool track_ach_;

    std::vector<uint8_t> explored_;
    std::vector<int> uf_parent_;
    std::unordered_map<int, int> comp_size_;
    std::vector<std::vector<std::pair<int, int>>> forest_;  // vertex -> (edge, other)
    std::vector<uint8_t> edge_state_;
    std::vector<AchieverSet> edge_ach_;
    std::vector<std::vector<int>> blocked_by_var_;  // slot m = hand-only failures
    std::vector<int> vertex_queue_;
    std::vector<int> worklist_;
    std::vector<int> trace_prev_;
    long edges_tried_ = 0;
};

// ---------------------------------------------------------------------------
// Mode cache: singleton-state reachability shared across search states with
// identical placements and grasp (Move actions do not change the mode).

class ModeReachCache {
public:
    explicit ModeReachCache(CRG& crg) : crg_(&crg) {}

    struct Entry {
        RelaxedState s_plus;
        std::unique_ptr<ReachContext> ctx;
    };

    ReachContext& context_for(const State& s) {
        std::vector<uint32_t> key;
        key.reserve(s.vals.size());
        key.push_back(s(kVarHand).bits);
        for (int o = 0; o < crg_->num_objects(); ++o) key.push_back(s(var_pose(o)).bits);
        auto it = modes_.find(key);
        if (it == modes_.end()) {
            if (modes_.size() >= kMaxModes) modes_.clear();
            Entry entry;
            entry.s_plus = RelaxedState::singleton(s);
            entry.ctx = std::make_unique<ReachContext>(*crg_, /*track_achievers=*/false);
            it = modes_.emplace(std::move(key), std::move(entry)).first;
            it->second.ctx->attach(&it->second.s_plus);
        }
        return *it->second.ctx;
    }

    bool reachable(const State& s, int q1, int q2) {
        ReachContext& ctx = context_for(s);
        ctx.add_root(q1);
        ctx.drain();
        return ctx.connected(q1, q2);
    }

    /// All of `targets` reachable from s(v_r) under the singleton view.
    std::vector<int> reachable_targets(const State& s, std::span<const int> targets) {
        ReachContext& ctx = context_for(s);
        int q = s(kVarRobot).index();
        ctx.add_root(q);
        ctx.drain();
        std::vector<int> out;
        for (int t : targets)
            if (ctx.connected(q, t)) out.push_back(t);
        return out;
    }

    void clear() { modes_.clear(); }

private:
    struct KeyHash {
        size_t operator()(const std::vector<uint32_t>& k) const {
            size_t h = 1469598103934665603ull;
            for (uint32_t x : k) h = (h ^ x) * 1099511628211ull;
            return h;
        }
    };

    static constexpr size_t kMaxModes = 1024;

    CRG* crg_;
    std::unordered_map<std::vector<uint32_t>, Entry, KeyHash> modes_;
};

}  // namespace ffplan
