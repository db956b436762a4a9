// SPDX-License-Identifier: Apache-2.0
//
// Full three-stage run on one instance: group-sparsity stage, active-set
// selection, relaxation on the selected set and beamformer recovery.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgsbf/stage1.hpp"
#include "rgsbf/stage2.hpp"
#include "rgsbf/stage3.hpp"

namespace rgsbf {

struct PipelineConfig {
    Stage1Config stage1;
    sdp::SolverConfig solver;
    RandomizationConfig randomization;
    /// Candidate count of the single recovery retry after AllCandidatesInfeasible.
    int retry_candidate_count = 400;
    /// Exhaustive search only: skip subsets of sets whose relaxation is infeasible.
    bool prune_exhaustive = false;
};

struct MethodOutcome {
    bool ok = false;
    std::string failure;  // empty when ok
    BeamformingSolution solution;
    double sdr_objective = 0.0;
    RecoveryStatus recovery = RecoveryStatus::AllCandidatesInfeasible;
    bool recovery_retried = false;
    /// Number of times the relaxation on the selected set was infeasible and one fewer RRH was switched off.
    int sdr_fallbacks = 0;
    int switched_off = 0;
    int feasibility_checks = 0;
    bool monotonicity_violation = false;
    Stage1Status stage1_status = Stage1Status::Converged;
    int stage1_iterations = 0;
    double stationarity_change = -1.0;
    std::vector<double> objective_trace;
    /// Exhaustive search: (mask as 0/1 string, SDR objective) per feasible subset.
    std::vector<std::pair<std::string, double>> subset_log;
};

/// Relaxation plus recovery on a fixed active set, with the recovery retry.
/// `seed` drives the randomization substream.
MethodOutcome solve_on_active_set(const NetworkInstance& inst, const std::vector<bool>& active,
                                  const PipelineConfig& cfg, std::uint64_t seed);

/// Stages two and three given an ordering; falls back to fewer switched-off RRHs while the relaxation is infeasible.
MethodOutcome finish_from_ordering(const NetworkInstance& inst, RrhOrdering ordering, const PipelineConfig& cfg,
                                   std::uint64_t seed);

MethodOutcome proposed_pipeline(const NetworkInstance& inst, const PipelineConfig& cfg, std::uint64_t seed);

std::string mask_string(const std::vector<bool>& active);

}  // namespace rgsbf
