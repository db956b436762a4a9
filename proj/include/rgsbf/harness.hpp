// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte Carlo sweeps over SINR targets and methods, aggregation and
// CSV output.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rgsbf/baselines.hpp"

namespace rgsbf {

struct TrialRecord {
    std::string method;
    double sinr_db = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string failure;
    std::string active_mask;
    int active_count = 0;
    double network_power = 0.0;
    double transmit_power = 0.0;
    double fronthaul_power = 0.0;
    double sdr_objective = 0.0;
    double min_margin = 0.0;
    /// Worst-case margins and per-RRH budgets re-checked on the returned beams.
    bool invariants_hold = false;
    std::string recovery;
    int stage1_iterations = 0;
    double stationarity_change = -1.0;
    std::string stage1_status;
    int feasibility_checks = 0;
    bool monotonicity_violation = false;
    int sdr_fallbacks = 0;
    bool recovery_retried = false;
    std::vector<double> trace;
};

struct SummaryRow {
    std::string method;
    double sinr_db = 0.0;
    double mean_network_power = 0.0;
    double mean_active_count = 0.0;
    double mean_transmit_power = 0.0;
    double mean_fronthaul_power = 0.0;
    int trials = 0;    // successful trials
    int failures = 0;
};

struct ExperimentResult {
    std::string scenario;
    std::vector<SummaryRow> summary;
    std::vector<TrialRecord> trials;

    /// Throws std::out_of_range when the pair is absent.
    const SummaryRow& at(const std::string& method, double sinr_db) const;
};

/// Runs one method on one instance and records the outcome.
TrialRecord run_trial(const NetworkInstance& inst, Method m, const PipelineConfig& cfg, double sinr_db, int trial,
                      std::uint64_t seed);

/// All (SINR, trial) pairs of `spec`, each trial running every method of spec.methods on the same channels.
/// Trial t uses seed spec.seed + t. Work is spread over `jobs` threads; the output order is fixed.
std::vector<TrialRecord> run_trials(const ScenarioSpec& spec, const PipelineConfig& cfg, int jobs = 1);

/// Means over successful trials per (method, SINR); rows sorted by method order, then SINR.
std::vector<SummaryRow> aggregate(const std::vector<TrialRecord>& trials);

ExperimentResult run_experiment(const ScenarioSpec& spec, const PipelineConfig& cfg = {}, int jobs = 1);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& trials);
/// Reads what write_trials_csv wrote (traces are not stored there). Throws ConfigError on malformed input.
std::vector<TrialRecord> read_trials_csv(std::istream& in);
/// method,sinr_db,trial,seed,iteration,objective
void write_traces_csv(std::ostream& out, const std::vector<TrialRecord>& trials);

/// Writes summary.csv, trials.csv and, when `traces` is set, trace.csv into `dir` (created if missing).
void write_experiment(const std::string& dir, const ExperimentResult& r, bool traces);

}  // namespace rgsbf
