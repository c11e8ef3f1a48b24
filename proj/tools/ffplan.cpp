/**
 * @file
 * @brief Command-line front end: solve a scenario, run the benchmark matrix,
 *  render worlds and plans to SVG, or validate a scenario file. Human logs
 *  go to stderr; machine output goes to files only.
 *
 * Exit codes: 0 solved / OK, 1 no plan within budget, 2 invalid input.
 */

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ffplan/bench.hpp"
#include "ffplan/svg.hpp"
#include "ffplan/theory.hpp"

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitNoPlan = 1;
constexpr int kExitBadInput = 2;

/// A scenario argument is either a built-in name (e.g. "R1") or a JSON file.
ffplan::Scenario resolve_scenario(const std::string& arg) {
    if (auto sc = ffplan::builtin_scenario(arg)) return std::move(*sc);
    return ffplan::load_scenario(arg);
}

bool parse_config_label(const std::string& label, ffplan::BenchConfig& out) {
    std::stringstream ss(label);
    std::string part;
    bool first = true;
    while (std::getline(ss, part, '/')) {
        if (first) {
            auto h = ffplan::heuristic_from_name(part);
            if (!h) return false;
            out.heuristic = *h;
            first = false;
        } else if (part == "bfs") {
            out.strategy = ffplan::Strategy::BFS;
        } else if (part == "dbfs") {
            out.strategy = ffplan::Strategy::DBFS;
        } else if (part.size() > 1 && part[0] == 'w') {
            out.w = std::stod(part.substr(1));
        } else {
            return false;
        }
    }
    return !first;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

int cmd_solve(const std::string& scenario, const std::string& heuristic,
              const std::string& strategy, double weight, uint64_t seed, double timeout,
              long expansions, int iterations, const std::string& plan_out,
              const std::string& stats_out, const std::string& svg_out) {
    ffplan::Scenario sc = resolve_scenario(scenario);
    ffplan::audit_scenario(sc);

    ffplan::PlannerConfig cfg;
    auto h = ffplan::heuristic_from_name(heuristic);
    if (!h) throw std::runtime_error("unknown heuristic: " + heuristic);
    cfg.heuristic = *h;
    if (strategy == "bfs")
        cfg.strategy = ffplan::Strategy::BFS;
    else if (strategy == "dbfs")
        cfg.strategy = ffplan::Strategy::DBFS;
    else
        throw std::runtime_error("unknown search strategy: " + strategy);
    cfg.w = weight;
    cfg.seed = seed;
    cfg.theta = sc.theta;
    cfg.max_seconds = timeout;
    cfg.max_expansions = expansions;
    cfg.max_iterations = iterations;

    std::cerr << "solving " << sc.name << " with " << heuristic << "/" << strategy << " w=" << weight
              << " seed=" << seed << "\n";
    ffplan::PlanReport rep = ffplan::plan(sc.ppm, cfg);
    std::cerr << (rep.solved ? "solved" : "no plan") << ": " << rep.steps.size() << " steps, "
              << rep.expansions << " expansions, " << rep.iterations << " sampling rounds\n";

    if (!plan_out.empty())
        write_file(plan_out, ffplan::plan_to_json(sc.ppm, rep.steps).dump(2) + "\n");
    if (!stats_out.empty()) write_file(stats_out, ffplan::report_to_json(rep).dump(2) + "\n");
    if (!svg_out.empty()) write_file(svg_out, ffplan::render_svg(sc.ppm, rep.steps));
    return rep.solved ? kExitSolved : kExitNoPlan;
}

int cmd_bench(const std::string& suite, const std::string& configs, int seeds, double timeout,
              long expansions, int iterations, const std::string& out_dir) {
    std::vector<ffplan::Scenario> scenarios;
    if (suite == "all") {
        scenarios = ffplan::builtin_scenarios();
    } else {
        std::stringstream ss(suite);
        std::string name;
        while (std::getline(ss, name, ',')) scenarios.push_back(resolve_scenario(name));
    }

    std::vector<ffplan::BenchConfig> bcs;
    std::stringstream ss(configs);
    std::string label;
    while (std::getline(ss, label, ',')) {
        ffplan::BenchConfig bc;
        if (!parse_config_label(label, bc)) throw std::runtime_error("bad config: " + label);
        bcs.push_back(bc);
    }
    if (bcs.empty()) throw std::runtime_error("no configs given");

    ffplan::BenchBudget budget;
    budget.max_seconds = timeout;
    budget.max_expansions = expansions;
    budget.max_iterations = iterations;

    std::filesystem::create_directories(out_dir);
    auto results = ffplan::run_experiments(scenarios, bcs, seeds, budget,
                                           [](const ffplan::TrialResult& r) {
                                               std::cerr << r.scenario << " " << r.config
                                                         << " seed=" << r.seed
                                                         << (r.solved ? " solved" : " no-plan")
                                                         << " (" << r.wall_seconds << "s)\n";
                                           });

    std::ofstream raw(out_dir + "/raw.jsonl");
    ffplan::write_jsonl(raw, results, /*with_wall_time=*/false);
    std::ofstream timed(out_dir + "/raw_timed.jsonl");
    ffplan::write_jsonl(timed, results, /*with_wall_time=*/true);
    write_file(out_dir + "/summary.txt", ffplan::summary_table(results));
    std::cerr << ffplan::summary_table(results);
    return kExitSolved;
}

int cmd_render(const std::string& scenario, const std::string& plan_file, bool roadmap_flag,
               const std::string& out) {
    ffplan::Scenario sc = resolve_scenario(scenario);
    std::vector<ffplan::PlanStep> steps;
    if (!plan_file.empty()) {
        std::ifstream in(plan_file);
        if (!in) throw std::runtime_error("cannot open plan file: " + plan_file);
        nlohmann::json j;
        in >> j;
        steps = ffplan::plan_from_json(j);
    }
    ffplan::RenderOptions opt;
    opt.draw_roadmap = roadmap_flag;
    write_file(out, ffplan::render_svg(sc.ppm, steps, nullptr, opt));
    return kExitSolved;
}

int cmd_validate(const std::string& scenario) {
    ffplan::Scenario sc = resolve_scenario(scenario);
    ffplan::audit_scenario(sc);
    std::cerr << "scenario " << sc.name << " OK: " << sc.ppm.world.objects.size() << " objects, "
              << sc.ppm.world.obstacles.size() << " obstacles\n";
    return kExitSolved;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D pick-place-move planner"};
    app.require_subcommand(1);

    std::string scenario, heuristic = "ffrob-ha", strategy = "dbfs";
    double weight = 0.8, timeout = 60;
    uint64_t seed = 0;
    long expansions = 50000;
    int iterations = 4, seeds = 20;
    std::string plan_out, stats_out, svg_out, plan_file, out_path, suite = "all",
                configs = "ffrob-ha/dbfs";
    bool roadmap_flag = false;

    CLI::App* solve = app.add_subcommand("solve", "solve one scenario");
    solve->add_option("--scenario", scenario, "builtin name or JSON file")->required();
    solve->add_option("--heuristic", heuristic,
                      "h0|goals|ff|maxrob|addrob|ffrob|ffrob-ha");
    solve->add_option("--search", strategy, "bfs|dbfs");
    solve->add_option("--weight", weight, "heuristic weight in [0,1]");
    solve->add_option("--seed", seed);
    solve->add_option("--timeout", timeout, "seconds; <0 unbounded");
    solve->add_option("--expansions", expansions, "total expansion budget; <0 unbounded");
    solve->add_option("--iterations", iterations, "max sampling rounds");
    solve->add_option("--plan-out", plan_out);
    solve->add_option("--stats-out", stats_out);
    solve->add_option("--svg-out", svg_out);

    CLI::App* bench = app.add_subcommand("bench", "run the experiment matrix");
    bench->add_option("--suite", suite, "'all' or comma-separated scenario names/files");
    bench->add_option("--configs", configs,
                      "comma-separated heuristic[/search][/wW] labels");
    bench->add_option("--seeds", seeds, "seeds 0..N-1 per cell");
    bench->add_option("--timeout", timeout, "seconds per trial");
    bench->add_option("--expansions", expansions, "expansion budget per trial");
    bench->add_option("--iterations", iterations, "max sampling rounds per trial");
    bench->add_option("--out", out_path, "output directory")->required();

    CLI::App* render = app.add_subcommand("render", "render a scenario (and plan) to SVG");
    render->add_option("--scenario", scenario, "builtin name or JSON file")->required();
    render->add_option("--plan", plan_file, "plan JSON from solve --plan-out");
    render->add_flag("--roadmap", roadmap_flag, "draw roadmap edges");
    render->add_option("--out", out_path, "output SVG path")->required();

    CLI::App* validate = app.add_subcommand("validate", "audit a scenario file");
    validate->add_option("--scenario", scenario, "builtin name or JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed())
            return cmd_solve(scenario, heuristic, strategy, weight, seed, timeout, expansions,
                             iterations, plan_out, stats_out, svg_out);
        if (bench->parsed())
            return cmd_bench(suite, configs, seeds, timeout, expansions, iterations, out_path);
        if (render->parsed()) return cmd_render(scenario, plan_file, roadmap_flag, out_path);
        if (validate->parsed()) return cmd_validate(scenario);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}
