// SPDX-License-Identifier: Apache-2.0

#include "rgsbf/pipeline.hpp"

namespace rgsbf {

std::string mask_string(const std::vector<bool>& active) {
    std::string s;
    for (bool a : active) s += a ? '1' : '0';
    return s;
}

MethodOutcome solve_on_active_set(const NetworkInstance& inst, const std::vector<bool>& active,
                                  const PipelineConfig& cfg, std::uint64_t seed) {
    MethodOutcome out;
    const SdrResult sdr = solve_sdr(inst, active, cfg.solver);
    if (sdr.status != sdp::SolveStatus::Optimal) {
        out.failure = std::string("relaxation ") + sdp::to_string(sdr.status);
        return out;
    }
    out.sdr_objective = sdr.objective;
    RandomizationConfig rc = cfg.randomization;
    rc.seed = seed;
    rc.solver = cfg.solver;
    RecoveryResult rec = recover_beamformers(inst, active, sdr.lifted, rc);
    if (rec.status == RecoveryStatus::AllCandidatesInfeasible) {
        out.recovery_retried = true;
        rc.candidate_count = cfg.retry_candidate_count;
        rec = gaussian_randomize(inst, active, sdr.lifted, rc);
    }
    out.recovery = rec.status;
    if (rec.status == RecoveryStatus::AllCandidatesInfeasible) {
        out.failure = "all randomization candidates infeasible";
        return out;
    }
    out.solution = std::move(rec.solution);
    out.ok = true;
    return out;
}

MethodOutcome finish_from_ordering(const NetworkInstance& inst, RrhOrdering ordering, const PipelineConfig& cfg,
                                   std::uint64_t seed) {
    const SelectionResult sel = select_active_set(inst, ordering, cfg.solver);
    MethodOutcome out;
    if (!sel.feasible) {
        out.failure = "no feasible active set";
        out.feasibility_checks = sel.checks;
        return out;
    }
    int fallbacks = 0;
    for (int j = sel.j0; j >= 0; --j, ++fallbacks) {
        const std::vector<bool> active = active_mask(inst.L, ordering.order, j);
        out = solve_on_active_set(inst, active, cfg, seed);
        if (out.ok || out.recovery_retried) {
            out.switched_off = j;
            break;
        }
    }
    out.sdr_fallbacks = fallbacks;
    out.feasibility_checks = sel.checks;
    out.monotonicity_violation = sel.monotonicity_violation;
    return out;
}

MethodOutcome proposed_pipeline(const NetworkInstance& inst, const PipelineConfig& cfg, std::uint64_t seed) {
    Stage1Config s1 = cfg.stage1;
    s1.solver = cfg.solver;
    const Stage1Result st = run_alternating(inst, s1);
    if (st.status == Stage1Status::Infeasible || st.status == Stage1Status::SolverFailure) {
        MethodOutcome out;
        out.stage1_status = st.status;
        out.failure = std::string("stage one ") + to_string(st.status);
        out.objective_trace = st.lifted.objective_trace;
        return out;
    }
    MethodOutcome out = finish_from_ordering(inst, compute_ordering(inst, st.lifted), cfg, seed);
    out.stage1_status = st.status;
    out.stage1_iterations = st.iterations;
    out.stationarity_change = st.stationarity_change;
    out.objective_trace = st.lifted.objective_trace;
    return out;
}

}  // namespace rgsbf
