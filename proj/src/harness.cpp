// SPDX-License-Identifier: Apache-2.0

#include "rgsbf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rgsbf/errors.hpp"

namespace rgsbf {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

int method_rank(const std::string& name) {
    try {
        return static_cast<int>(parse_method(name));
    } catch (const ConfigError&) {
        return 1000;
    }
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

const char* kTrialHeader =
    "method,sinr_db,trial,seed,ok,failure,active_mask,active_count,network_power,transmit_power,fronthaul_power,"
    "sdr_objective,min_margin,invariants_hold,recovery,stage1_status,stage1_iterations,feasibility_checks,"
    "monotonicity_violation,sdr_fallbacks,recovery_retried,stationarity_change";

}  // namespace

const SummaryRow& ExperimentResult::at(const std::string& method, double sinr_db) const {
    for (const auto& r : summary) {
        if (r.method == method && r.sinr_db == sinr_db) return r;
    }
    throw std::out_of_range("no summary row for " + method + " at " + num(sinr_db) + " dB");
}

TrialRecord run_trial(const NetworkInstance& inst, Method m, const PipelineConfig& cfg, double sinr_db, int trial,
                      std::uint64_t seed) {
    TrialRecord r;
    r.method = to_string(m);
    r.sinr_db = sinr_db;
    r.trial = trial;
    r.seed = seed;
    try {
        const MethodOutcome o = run_method(inst, m, cfg, seed);
        r.ok = o.ok;
        r.failure = sanitize(o.failure);
        r.sdr_objective = o.sdr_objective;
        r.recovery = o.ok ? to_string(o.recovery) : "";
        if (m == Method::Proposed) r.stage1_status = to_string(o.stage1_status);
        r.stage1_iterations = o.stage1_iterations;
        r.stationarity_change = o.stationarity_change;
        r.feasibility_checks = o.feasibility_checks;
        r.monotonicity_violation = o.monotonicity_violation;
        r.sdr_fallbacks = o.sdr_fallbacks;
        r.recovery_retried = o.recovery_retried;
        r.trace = o.objective_trace;
        if (o.ok) {
            const BeamformingSolution& s = o.solution;
            r.active_mask = mask_string(s.active);
            r.active_count = s.active_count();
            r.network_power = s.network_power;
            r.transmit_power = transmit_power(inst, s);
            r.fronthaul_power = fronthaul_power(inst, s.active);
            r.min_margin = s.min_margin();
            r.invariants_hold = satisfies_constraints(inst, s);
        }
    } catch (const std::exception& e) {
        r.ok = false;
        r.failure = sanitize(std::string("exception: ") + e.what());
    }
    return r;
}

std::vector<TrialRecord> run_trials(const ScenarioSpec& spec, const PipelineConfig& cfg, int jobs) {
    spec.validate();
    std::vector<Method> methods;
    for (const auto& name : spec.methods) methods.push_back(parse_method(name));
    const std::size_t points = spec.sinr_db_list.size();
    const std::size_t tasks = points * static_cast<std::size_t>(spec.trials);
    std::vector<std::vector<TrialRecord>> slots(tasks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks; i = next++) {
            const double db = spec.sinr_db_list[i / static_cast<std::size_t>(spec.trials)];
            const int t = static_cast<int>(i % static_cast<std::size_t>(spec.trials));
            const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(t);
            std::vector<TrialRecord>& out = slots[i];
            try {
                const NetworkInstance inst = generate_instance(spec, seed, db);
                for (Method m : methods) out.push_back(run_trial(inst, m, cfg, db, t, seed));
            } catch (const std::exception& e) {
                for (Method m : methods) {
                    TrialRecord r;
                    r.method = to_string(m);
                    r.sinr_db = db;
                    r.trial = t;
                    r.seed = seed;
                    r.failure = sanitize(std::string("exception: ") + e.what());
                    out.push_back(r);
                }
            }
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(tasks)));
    std::vector<std::thread> pool;
    for (int j = 1; j < n; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    std::vector<TrialRecord> all;
    for (auto& s : slots) {
        for (auto& r : s) all.push_back(std::move(r));
    }
    return all;
}

std::vector<SummaryRow> aggregate(const std::vector<TrialRecord>& trials) {
    std::map<std::tuple<int, std::string, double>, SummaryRow> rows;
    for (const auto& t : trials) {
        SummaryRow& r = rows[{method_rank(t.method), t.method, t.sinr_db}];
        r.method = t.method;
        r.sinr_db = t.sinr_db;
        if (!t.ok) {
            ++r.failures;
            continue;
        }
        ++r.trials;
        r.mean_network_power += t.network_power;
        r.mean_active_count += t.active_count;
        r.mean_transmit_power += t.transmit_power;
        r.mean_fronthaul_power += t.fronthaul_power;
    }
    std::vector<SummaryRow> out;
    for (auto& [key, r] : rows) {
        if (r.trials > 0) {
            const double n = r.trials;
            r.mean_network_power /= n;
            r.mean_active_count /= n;
            r.mean_transmit_power /= n;
            r.mean_fronthaul_power /= n;
        }
        out.push_back(r);
    }
    return out;
}

ExperimentResult run_experiment(const ScenarioSpec& spec, const PipelineConfig& cfg, int jobs) {
    ExperimentResult r;
    r.scenario = spec.name;
    r.trials = run_trials(spec, cfg, jobs);
    r.summary = aggregate(r.trials);
    return r;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "method,sinr_db,mean_network_power,mean_active_count,mean_transmit_power,mean_fronthaul_power,trials,failures\n";
    for (const auto& r : rows) {
        out << r.method << ',' << num(r.sinr_db) << ',' << num(r.mean_network_power) << ',' << num(r.mean_active_count)
            << ',' << num(r.mean_transmit_power) << ',' << num(r.mean_fronthaul_power) << ',' << r.trials << ','
            << r.failures << '\n';
    }
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& trials) {
    out << kTrialHeader << '\n';
    for (const auto& t : trials) {
        out << t.method << ',' << num(t.sinr_db) << ',' << t.trial << ',' << t.seed << ',' << int(t.ok) << ','
            << t.failure << ',' << t.active_mask << ',' << t.active_count << ',' << num(t.network_power) << ','
            << num(t.transmit_power) << ',' << num(t.fronthaul_power) << ',' << num(t.sdr_objective) << ','
            << num(t.min_margin) << ',' << int(t.invariants_hold) << ',' << t.recovery << ',' << t.stage1_status
            << ',' << t.stage1_iterations << ',' << t.feasibility_checks << ',' << int(t.monotonicity_violation)
            << ',' << t.sdr_fallbacks << ',' << int(t.recovery_retried) << ',' << num(t.stationarity_change) << '\n';
    }
}

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTrialHeader) throw ConfigError("trials CSV: unexpected header");
    std::vector<TrialRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 22) throw ConfigError("trials CSV: expected 22 fields in '" + line + "'");
        TrialRecord t;
        try {
            t.method = f[0];
            t.sinr_db = std::stod(f[1]);
            t.trial = std::stoi(f[2]);
            t.seed = std::stoull(f[3]);
            t.ok = f[4] == "1";
            t.failure = f[5];
            t.active_mask = f[6];
            t.active_count = std::stoi(f[7]);
            t.network_power = std::stod(f[8]);
            t.transmit_power = std::stod(f[9]);
            t.fronthaul_power = std::stod(f[10]);
            t.sdr_objective = std::stod(f[11]);
            t.min_margin = std::stod(f[12]);
            t.invariants_hold = f[13] == "1";
            t.recovery = f[14];
            t.stage1_status = f[15];
            t.stage1_iterations = std::stoi(f[16]);
            t.feasibility_checks = std::stoi(f[17]);
            t.monotonicity_violation = f[18] == "1";
            t.sdr_fallbacks = std::stoi(f[19]);
            t.recovery_retried = f[20] == "1";
            t.stationarity_change = std::stod(f[21]);
        } catch (const std::logic_error&) {
            throw ConfigError("trials CSV: bad number in '" + line + "'");
        }
        out.push_back(std::move(t));
    }
    return out;
}

void write_traces_csv(std::ostream& out, const std::vector<TrialRecord>& trials) {
    out << "method,sinr_db,trial,seed,iteration,objective\n";
    for (const auto& t : trials) {
        for (std::size_t i = 0; i < t.trace.size(); ++i) {
            out << t.method << ',' << num(t.sinr_db) << ',' << t.trial << ',' << t.seed << ',' << i + 1 << ','
                << num(t.trace[i]) << '\n';
        }
    }
}

void write_experiment(const std::string& dir, const ExperimentResult& r, bool traces) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(std::filesystem::path(dir) / name);
        if (!f) throw ConfigError("cannot write " + (std::filesystem::path(dir) / name).string());
        return f;
    };
    {
        auto f = open("summary.csv");
        write_summary_csv(f, r.summary);
    }
    {
        auto f = open("trials.csv");
        write_trials_csv(f, r.trials);
    }
    if (traces) {
        auto f = open("trace.csv");
        write_traces_csv(f, r.trials);
    }
}

}  // namespace rgsbf
