#pragma once
/**
 * @file
 * @brief Empirical convergence benches: failure-rate curves for a simplified
 *  all-pairs PRM on a corridor world of known clearance, and for the full
 *  planner as a function of its sampling-iteration budget. Companion to the
 *  probabilistic-completeness claims, validated by Monte Carlo trend rather
 *  than proof.
 */

#include <cmath>
#include <numeric>
#include <vector>

#include "ffplan/rng.hpp"
#include "ffplan/scenario.hpp"

namespace ffplan {

/// Number of spheres of radius δ/2 needed to cover a path of length L with
/// clearance δ: centers every δ/2, i.e. ⌈2L/δ⌉ steps plus the start sphere.
inline long sphere_cover_count(double path_length, double clearance) {
    return long(std::ceil(2.0 * path_length / clearance)) + 1;
}

struct ConvergencePoint {
    long budget = 0;  // samples (sPRM) or sampling iterations (planner)
    int trials = 0;
    int failures = 0;

    double failure_rate() const { return trials ? double(failures) / trials : 0; }
    /// Standard error of the failure-rate estimate.
    double stderr_rate() const {
        double p = failure_rate();
        return trials ? std::sqrt(p * (1 - p) / trials) : 0;
    }
};

/// Corridor world: two slabs leaving a horizontal passage of half-width
/// (robot radius + clearance/2) centered on y = mid. Start and goal sit in
/// open pockets on opposite sides so the straight connection is blocked.
inline World corridor_world(double clearance) {
    World w;
    w.workspace = {0, 0, 10, 10};
    w.robot_radius = 0.5;
    double half = w.robot_radius + clearance / 2;
    // Slabs span x in [3, 7]; passage y in [5 - half, 5 + half].
    double below = (5 - half) / 2, above = (10 - (5 + half)) / 2;
    w.obstacles.push_back({Shape::rect(2.0, below), Pose{5, below}});
    w.obstacles.push_back({Shape::rect(2.0, above), Pose{5, 10 - above}});
    return w;
}

namespace detail {

/// One simplified-PRM trial: n uniform samples plus {start, goal}, every new
/// configuration linked to all earlier ones whose straight segment is free.
/// Success iff start and goal end up in the same connected component.
inline bool sprm_trial(const World& w, Vec2 start, Vec2 goal, int n, Rng& rng) {
    std::vector<Vec2> verts{start, goal};
    Rect inner = w.workspace.shrunk(w.robot_radius);
    for (int i = 0; i < n; ++i) {
        Vec2 q = rng.in_rect(inner);
        if (config_free(q, w.robot_radius, w)) verts.push_back(q);
    }

    std::vector<int> parent(verts.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[size_t(v)] != v) v = parent[size_t(v)] = parent[size_t(parent[size_t(v)])];
        return v;
    };
    for (size_t i = 1; i < verts.size(); ++i)
        for (size_t k = 0; k < i; ++k) {
            int a = find(int(i)), b = find(int(k));
            if (a == b) continue;
            if (traj_free_fixed({verts[i], verts[k]}, w.robot_radius, w)) parent[size_t(a)] = b;
        }
    return find(0) == find(1);
}

}  // namespace detail

/// Failure fraction of the all-pairs PRM on the corridor world, per sample
/// count. Start/goal pockets are fixed at (1,1) and (9,9).
inline std::vector<ConvergencePoint> sprm_convergence(double clearance,
                                                      const std::vector<long>& sample_counts,
                                                      int trials, uint64_t seed = 0) {
    World w = corridor_world(clearance);
    Vec2 start{1, 1}, goal{9, 9};
    std::vector<ConvergencePoint> curve;
    for (long n : sample_counts) {
        ConvergencePoint pt;
        pt.budget = n;
        pt.trials = trials;
        for (int t = 0; t < trials; ++t) {
            Rng rng(seed + uint64_t(t) * 1000003 + uint64_t(n));
            if (!detail::sprm_trial(w, start, goal, int(n), rng)) ++pt.failures;
        }
        curve.push_back(pt);
    }
    return curve;
}

/// Least-squares slope of log(failure rate) against budget, over the points
/// with nonzero failures. A negative slope is the exponential-decay signature.
inline double log_failure_slope(const std::vector<ConvergencePoint>& curve) {
    std::vector<double> xs, ys;
    for (const ConvergencePoint& p : curve)
        if (p.failures > 0) {
            xs.push_back(double(p.budget));
            ys.push_back(std::log(p.failure_rate()));
        }
    if (xs.size() < 2) return 0;
    double n = double(xs.size());
    double sx = std::accumulate(xs.begin(), xs.end(), 0.0);
    double sy = std::accumulate(ys.begin(), ys.end(), 0.0);
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    return denom == 0 ? 0 : (n * sxy - sx * sy) / denom;
}

/// Planner failure fraction as a function of the sampling-iteration budget.
/// Each trial gets a fresh seed; searches are capped per trial so failing
/// budgets terminate quickly.
inline std::vector<ConvergencePoint> ffrob_convergence(const Scenario& sc,
                                                       const std::vector<long>& iteration_budgets,
                                                       int trials, long expansions_per_trial,
                                                       double seconds_per_trial,
                                                       uint64_t seed = 0) {
    std::vector<ConvergencePoint> curve;
    for (long iters : iteration_budgets) {
        ConvergencePoint pt;
        pt.budget = iters;
        pt.trials = trials;
        for (int t = 0; t < trials; ++t) {
            PlannerConfig cfg;
            cfg.theta = sc.theta;
            cfg.seed = seed + uint64_t(t);
            cfg.max_iterations = int(iters);
            cfg.max_expansions = iters == 0 ? 0 : expansions_per_trial;
            cfg.max_seconds = seconds_per_trial;
            if (iters > 0 && !plan(sc.ppm, cfg).solved) ++pt.failures;
            if (iters == 0) ++pt.failures;  // no sampling round: nothing to search
        }
        curve.push_back(pt);
    }
    return curve;
}

/// Monotone-trend check with Monte Carlo slack: no point may exceed its
/// predecessor's failure rate by more than `se_mult` combined standard errors.
inline bool nonincreasing_within_noise(const std::vector<ConvergencePoint>& curve,
                                       double se_mult = 2.0) {
    for (size_t i = 1; i < curve.size(); ++i) {
        double slack = se_mult * (curve[i - 1].stderr_rate() + curve[i].stderr_rate());
        if (curve[i].failure_rate() > curve[i - 1].failure_rate() + slack) return false;
    }
    return true;
}

}  // namespace ffplan
