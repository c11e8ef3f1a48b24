#pragma once
/**
 * @file
 * @brief Experiment harness: runs the scenario × configuration × seed
 *  cross-product, records per-trial effort counters, and aggregates them
 *  into a success-rate / mean-runtime summary table. Raw results serialize
 *  to line-delimited JSON; wall time is kept out of the deterministic
 *  fields so raw files can be byte-compared across runs.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ffplan/scenario.hpp"

namespace ffplan {

/// A named planner configuration: heuristic, search strategy, and weight.
struct BenchConfig {
    Heuristic heuristic = Heuristic::FFRobHA;
    Strategy strategy = Strategy::DBFS;
    double w = 0.8;

    std::string label() const {
        std::ostringstream os;
        os << heuristic_name(heuristic) << '/' << (strategy == Strategy::DBFS ? "dbfs" : "bfs");
        if (w != 0.8) os << "/w" << w;
        return os.str();
    }
};

struct BenchBudget {
    double max_seconds = 60;
    long max_expansions = 50000;
    int max_iterations = 4;
};

struct TrialResult {
    std::string scenario;
    std::string config;
    uint64_t seed = 0;
    bool solved = false;
    double wall_seconds = 0;  // informative only; excluded from comparisons
    int iterations = 0;
    long expansions = 0;
    long evaluations = 0;
    long collision_calls = 0;
    int plan_length = 0;
};

inline TrialResult run_trial(const Scenario& sc, const BenchConfig& bc, uint64_t seed,
                             const BenchBudget& budget) {
    PlannerConfig cfg;
    cfg.heuristic = bc.heuristic;
    cfg.strategy = bc.strategy;
    cfg.w = bc.w;
    cfg.theta = sc.theta;
    cfg.seed = seed;
    cfg.max_seconds = budget.max_seconds;
    cfg.max_expansions = budget.max_expansions;
    cfg.max_iterations = budget.max_iterations;

    auto t0 = std::chrono::steady_clock::now();
    PlanReport rep = plan(sc.ppm, cfg);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    TrialResult r;
    r.scenario = sc.name;
    r.config = bc.label();
    r.seed = seed;
    r.solved = rep.solved;
    r.wall_seconds = secs;
    r.iterations = rep.iterations;
    r.expansions = rep.expansions;
    r.evaluations = rep.evaluations;
    r.collision_calls = rep.geometry_calls;
    r.plan_length = int(rep.steps.size());
    return r;
}

/// Full cross-product, in deterministic (scenario, config, seed) order.
/// `progress`, if set, receives each finished trial (for live logging).
inline std::vector<TrialResult> run_experiments(
    const std::vector<Scenario>& scenarios, const std::vector<BenchConfig>& configs, int seeds,
    const BenchBudget& budget,
    const std::function<void(const TrialResult&)>& progress = nullptr) {
    std::vector<TrialResult> out;
    for (const Scenario& sc : scenarios)
        for (const BenchConfig& bc : configs)
            for (int s = 0; s < seeds; ++s) {
                out.push_back(run_trial(sc, bc, uint64_t(s), budget));
                if (progress) progress(out.back());
            }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization.

/// Deterministic fields only — `wall_seconds` is written separately so the
/// raw record stream is byte-identical across repeated runs.
inline nlohmann::json trial_to_json(const TrialResult& r, bool with_wall_time = false) {
    nlohmann::json j;
    j["scenario"] = r.scenario;
    j["config"] = r.config;
    j["seed"] = r.seed;
    j["solved"] = r.solved;
    j["iterations"] = r.iterations;
    j["expansions"] = r.expansions;
    j["evaluations"] = r.evaluations;
    j["collision_calls"] = r.collision_calls;
    j["plan_length"] = r.plan_length;
    if (with_wall_time) j["wall_seconds"] = r.wall_seconds;
    return j;
}

inline TrialResult trial_from_json(const nlohmann::json& j) {
    TrialResult r;
    r.scenario = j.at("scenario").get<std::string>();
    r.config = j.at("config").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    r.solved = j.at("solved").get<bool>();
    r.iterations = j.at("iterations").get<int>();
    r.expansions = j.at("expansions").get<long>();
    r.evaluations = j.at("evaluations").get<long>();
    r.collision_calls = j.at("collision_calls").get<long>();
    r.plan_length = j.at("plan_length").get<int>();
    r.wall_seconds = j.value("wall_seconds", 0.0);
    return r;
}

inline void write_jsonl(std::ostream& os, const std::vector<TrialResult>& results,
                        bool with_wall_time = false) {
    for (const TrialResult& r : results) os << trial_to_json(r, with_wall_time).dump() << "\n";
}

// ---------------------------------------------------------------------------
// Plan and stats files.

inline const char* schema_name(Action::Schema s) {
    switch (s) {
        case Action::Schema::Move: return "move";
        case Action::Schema::Pick: return "pick";
        case Action::Schema::Place: return "place";
        case Action::Schema::Clean: return "clean";
        case Action::Schema::Cook: return "cook";
        case Action::Schema::Custom: return "custom";
    }
    return "?";
}

/// Ordered step records with resolved coordinates; `ppm` supplies object
/// names. Waypoints are included so a plan file can be re-rendered without
/// the discretization that produced it.
inline nlohmann::json plan_to_json(const PPMProblem& ppm, const std::vector<PlanStep>& steps) {
    using detail::vec_j;
    nlohmann::json arr = nlohmann::json::array();
    int n = 0;
    for (const PlanStep& st : steps) {
        const Action& a = st.action;
        nlohmann::json rec;
        rec["step"] = ++n;
        rec["action"] = schema_name(a.schema);
        if (a.obj >= 0) rec["object"] = ppm.world.objects[size_t(a.obj)].name;
        rec["config"] = vec_j(st.at);
        if (a.schema != Action::Schema::Move) rec["pose"] = vec_j(st.target);
        if (a.schema == Action::Schema::Pick || a.schema == Action::Schema::Place)
            rec["grasp_dir"] = vec_j(st.grasp_dir);
        if (!st.waypoints.empty()) {
            rec["waypoints"] = nlohmann::json::array();
            for (Vec2 v : st.waypoints) rec["waypoints"].push_back(vec_j(v));
        }
        arr.push_back(rec);
    }
    return arr;
}

/// Enough of each step to replay its geometry (for rendering): schema,
/// coordinates, and waypoints. Discrete table indices are not recoverable.
inline std::vector<PlanStep> plan_from_json(const nlohmann::json& arr) {
    using detail::vec_p;
    std::vector<PlanStep> steps;
    for (const auto& rec : arr) {
        PlanStep st;
        std::string kind = rec.at("action").get<std::string>();
        for (Action::Schema s :
             {Action::Schema::Move, Action::Schema::Pick, Action::Schema::Place,
              Action::Schema::Clean, Action::Schema::Cook})
            if (kind == schema_name(s)) st.action.schema = s;
        st.at = vec_p(rec.at("config"));
        if (rec.contains("pose")) st.target = vec_p(rec.at("pose"));
        if (rec.contains("grasp_dir")) st.grasp_dir = vec_p(rec.at("grasp_dir"));
        for (const auto& v : rec.value("waypoints", nlohmann::json::array()))
            st.waypoints.push_back(vec_p(v));
        steps.push_back(std::move(st));
    }
    return steps;
}

/// Deterministic effort counters only — byte-comparable across runs.
inline nlohmann::json report_to_json(const PlanReport& rep) {
    nlohmann::json j;
    j["solved"] = rep.solved;
    j["out_of_budget"] = rep.out_of_budget;
    j["plan_length"] = rep.steps.size();
    j["plan_cost"] = rep.plan_cost;
    j["iterations"] = rep.iterations;
    j["expansions"] = rep.expansions;
    j["evaluations"] = rep.evaluations;
    j["generated"] = rep.generated;
    j["dead_ends"] = rep.dead_ends;
    j["reopened"] = rep.reopened;
    j["geometry_calls"] = rep.geometry_calls;
    j["roadmap_vertices"] = rep.roadmap_vertices;
    j["num_actions"] = rep.num_actions;
    return j;
}

// ---------------------------------------------------------------------------
// Aggregation.

struct CellSummary {
    int trials = 0;
    int solved = 0;
    double mean_solved_seconds = 0;  // over solved trials only

    double rate() const { return trials ? double(solved) / trials : 0; }
};

/// Per (scenario, config) success rate and mean solved runtime.
inline std::map<std::pair<std::string, std::string>, CellSummary> aggregate(
    const std::vector<TrialResult>& results) {
    std::map<std::pair<std::string, std::string>, CellSummary> cells;
    for (const TrialResult& r : results) {
        CellSummary& c = cells[{r.scenario, r.config}];
        ++c.trials;
        if (r.solved) {
            // Incremental mean over solved trials.
            ++c.solved;
            c.mean_solved_seconds += (r.wall_seconds - c.mean_solved_seconds) / c.solved;
        }
    }
    return cells;
}

/// Text table: rows scenarios, columns configs, cells "NN% / SS.Ss".
inline std::string summary_table(const std::vector<TrialResult>& results) {
    auto cells = aggregate(results);
    std::vector<std::string> rows, cols;
    for (const auto& [key, _] : cells) {
        if (std::find(rows.begin(), rows.end(), key.first) == rows.end()) rows.push_back(key.first);
        if (std::find(cols.begin(), cols.end(), key.second) == cols.end())
            cols.push_back(key.second);
    }

    size_t wide = 10;
    for (const std::string& c : cols) wide = std::max(wide, c.size() + 2);

    std::ostringstream os;
    os << std::left << std::setw(10) << "scenario";
    for (const std::string& c : cols) os << std::setw(int(wide)) << c;
    os << "\n";
    for (const std::string& r : rows) {
        os << std::left << std::setw(10) << r;
        for (const std::string& c : cols) {
            auto it = cells.find({r, c});
            std::ostringstream cell;
            if (it == cells.end()) {
                cell << "-";
            } else {
                cell << int(std::lround(it->second.rate() * 100)) << "%";
                if (it->second.solved)
                    cell << " / " << std::fixed << std::setprecision(1)
                         << it->second.mean_solved_seconds << "s";
            }
            os << std::setw(int(wide)) << cell.str();
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace ffplan
