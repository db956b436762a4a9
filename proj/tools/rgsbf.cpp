// SPDX-License-Identifier: Apache-2.0
//
// rgsbf run <config> | trace <config> | solve <instance.json> | validate

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rgsbf/errors.hpp"
#include "rgsbf/harness.hpp"
#include "rgsbf/instance_io.hpp"
#include "rgsbf/validate.hpp"

namespace {

using namespace rgsbf;

struct SweepFlags {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    std::string methods;
    std::string out_dir;
    int jobs = 1;
};

void add_sweep_flags(CLI::App* cmd, SweepFlags& f) {
    cmd->add_option("config", f.config, "Scenario YAML file")->required()->check(CLI::ExistingFile);
    cmd->add_option_function<std::uint64_t>("--seed", [&f](std::uint64_t s) { f.seed = s, f.seed_set = true; },
                                            "Base seed (trial t uses seed + t)");
    cmd->add_option("--trials", f.trials, "Override the number of trials")->check(CLI::PositiveNumber);
    cmd->add_option("--methods", f.methods, "Comma-separated subset of proposed,linf,coordinated,exhaustive");
    cmd->add_option("--out-dir", f.out_dir, "Output directory (default $RGSBF_OUT_DIR or out/<scenario>)");
    cmd->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

ScenarioSpec load_with_overrides(const SweepFlags& f) {
    ScenarioSpec spec = load_scenario(f.config);
    if (f.seed_set) spec.seed = f.seed;
    if (f.trials > 0) spec.trials = f.trials;
    if (!f.methods.empty()) {
        spec.methods.clear();
        std::stringstream ss(f.methods);
        std::string m;
        while (std::getline(ss, m, ',')) {
            parse_method(m);
            spec.methods.push_back(m);
        }
    }
    return spec;
}

std::string output_dir(const SweepFlags& f, const ScenarioSpec& spec) {
    if (!f.out_dir.empty()) return f.out_dir;
    if (const char* env = std::getenv("RGSBF_OUT_DIR")) return std::string(env) + "/" + spec.name;
    return "out/" + spec.name;
}

void print_summary(const std::vector<SummaryRow>& rows) {
    std::printf("%-12s %8s %14s %10s %14s %14s %7s %8s\n", "method", "sinr_db", "network_W", "active", "transmit_W",
                "fronthaul_W", "trials", "failures");
    for (const auto& r : rows) {
        std::printf("%-12s %8.2f %14.4f %10.3f %14.4f %14.4f %7d %8d\n", r.method.c_str(), r.sinr_db,
                    r.mean_network_power, r.mean_active_count, r.mean_transmit_power, r.mean_fronthaul_power, r.trials,
                    r.failures);
    }
}

int cmd_run(const SweepFlags& f) {
    const ScenarioSpec spec = load_with_overrides(f);
    const ExperimentResult r = run_experiment(spec, PipelineConfig{}, f.jobs);
    const std::string dir = output_dir(f, spec);
    write_experiment(dir, r, true);
    print_summary(r.summary);
    std::printf("wrote %s/{summary,trials,trace}.csv\n", dir.c_str());
    return 0;
}

int cmd_trace(SweepFlags f) {
    if (f.methods.empty()) f.methods = "proposed";
    const ScenarioSpec spec = load_with_overrides(f);
    PipelineConfig cfg;
    cfg.stage1.stationarity_probe = true;
    const ExperimentResult r = run_experiment(spec, cfg, f.jobs);
    const std::string dir = output_dir(f, spec);
    write_experiment(dir, r, true);
    int converged = 0;
    int total = 0;
    for (const auto& t : r.trials) {
        if (t.method != "proposed") continue;
        ++total;
        converged += t.stage1_status == "converged";
        std::printf("sinr %5.2f trial %3d seed %llu iterations %2d %-15s extra-alternation change %.3g\n", t.sinr_db,
                    t.trial, static_cast<unsigned long long>(t.seed), t.stage1_iterations, t.stage1_status.c_str(),
                    t.stationarity_change);
    }
    std::printf("%d/%d converged; wrote %s/trace.csv\n", converged, total, dir.c_str());
    return 0;
}

int cmd_solve(const std::string& path, const std::string& method, std::uint64_t seed, const std::string& out) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    const NetworkInstance inst = instance_from_json(j);
    const MethodOutcome o = run_method(inst, parse_method(method), PipelineConfig{}, seed);
    const std::string text = outcome_to_json(inst, o, method).dump(2);
    if (out.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream f(out);
        if (!f) throw ConfigError("cannot write " + out);
        f << text << '\n';
    }
    return o.ok ? 0 : 3;
}

int cmd_validate(const std::string& level, std::uint64_t seed, double inject) {
    ValidationOptions opt;
    opt.level = level == "full" ? ValidationLevel::Full : ValidationLevel::Quick;
    opt.seed = seed;
    opt.injected_tolerance = inject;
    bool all = true;
    for (const auto& r : run_validation(opt)) {
        all = all && r.passed;
        std::printf("%-4s %-32s measured %-12.4g tolerance %-10.3g %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.measured, r.tolerance, r.detail.c_str());
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust group sparse beamforming for multicast Cloud-RAN"};
    app.require_subcommand(1);

    SweepFlags run_flags;
    auto* run = app.add_subcommand("run", "Monte Carlo sweep over a scenario config");
    add_sweep_flags(run, run_flags);

    SweepFlags trace_flags;
    auto* trace = app.add_subcommand("trace", "Stage-one objective traces for a scenario config");
    add_sweep_flags(trace, trace_flags);

    std::string instance_path;
    std::string method = "proposed";
    std::uint64_t solve_seed = 1;
    std::string solve_out;
    auto* solve = app.add_subcommand("solve", "Solve one JSON instance and print the solution as JSON");
    solve->add_option("instance", instance_path, "Instance JSON file")->required()->check(CLI::ExistingFile);
    solve->add_option("--method", method, "proposed, linf, coordinated or exhaustive");
    solve->add_option("--seed", solve_seed, "Randomization seed");
    solve->add_option("--out", solve_out, "Write the solution here instead of stdout");

    std::string level = "quick";
    std::uint64_t validate_seed = 1;
    double inject = 0.0;
    auto* validate = app.add_subcommand("validate", "Run the oracle suites");
    validate->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    validate->add_option("--seed", validate_seed, "Seed of the random suites");
    validate->add_option("--inject-tolerance", inject,
                         "Loosen the PSD test of the QoS blocks in the robustness suite (forces a failure when large)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(run_flags);
        if (*trace) return cmd_trace(trace_flags);
        if (*solve) return cmd_solve(instance_path, method, solve_seed, solve_out);
        if (*validate) return cmd_validate(level, validate_seed, inject);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
