// SPDX-License-Identifier: Apache-2.0

#include "rgsbf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rgsbf/errors.hpp"

namespace rgsbf {

MethodOutcome coordinated_beamforming(const NetworkInstance& inst, const PipelineConfig& cfg, std::uint64_t seed) {
    return solve_on_active_set(inst, std::vector<bool>(static_cast<std::size_t>(inst.L), true), cfg, seed);
}

MethodOutcome exhaustive_search(const NetworkInstance& inst, const PipelineConfig& cfg, std::uint64_t seed) {
    if (inst.L > kExhaustiveMaxRrhs) throw ModelError("exhaustive_search: too many RRHs");
    const std::uint32_t count = 1u << inst.L;
    std::vector<bool> infeasible(count, false);
    MethodOutcome best;
    double best_power = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::string, double>> log;
    int tried = 0;
    // supersets come before their subsets; with pruning, a set is skipped when a superset failed
    for (std::uint32_t bits = count; bits-- > 0;) {
        std::vector<bool> active(static_cast<std::size_t>(inst.L));
        for (int l = 0; l < inst.L; ++l) active[static_cast<std::size_t>(l)] = (bits >> l) & 1u;
        if (cfg.prune_exhaustive) {
            bool skip = false;
            for (int l = 0; l < inst.L && !skip; ++l) {
                if (!((bits >> l) & 1u)) skip = infeasible[bits | (1u << l)];
            }
            if (skip) {
                infeasible[bits] = true;
                continue;
            }
        }
        ++tried;
        MethodOutcome o = solve_on_active_set(inst, active, cfg, seed);
        if (!o.ok && !o.recovery_retried) {
            infeasible[bits] = true;
            continue;
        }
        log.emplace_back(mask_string(active), o.sdr_objective);
        if (o.ok && o.solution.network_power < best_power) {
            best_power = o.solution.network_power;
            best = std::move(o);
        }
    }
    if (!best.ok) best.failure = "every active set infeasible";
    std::reverse(log.begin(), log.end());
    best.subset_log = std::move(log);
    best.feasibility_checks = tried;
    if (best.ok) {
        best.switched_off = inst.L - best.solution.active_count();
    }
    return best;
}

LinfStageResult solve_linf_stage(const NetworkInstance& inst, const sdp::SolverConfig& solver) {
    LiftedModel model = make_lifted_model(inst);
    model.problem.set_objective(build_linf_objective(inst, model));
    add_qos_lmis(inst, model);
    const std::vector<bool> all(static_cast<std::size_t>(inst.L), true);
    for (auto& c : build_power_constraints(inst, model, all)) model.problem.add_constraint(std::move(c));
    const sdp::SdpSolution sol = sdp::solve(model.problem, solver);
    LinfStageResult r;
    r.status = sol.status;
    if (sol.status != sdp::SolveStatus::Optimal) return r;
    r.lifted = extract_lifted(inst, model, sol);
    r.objective = sol.objective_value;
    return r;
}

std::vector<double> linf_scores(const NetworkInstance& inst, const LiftedSolution& q) {
    std::vector<double> s(static_cast<std::size_t>(inst.L), 0.0);
    for (int l = 0; l < inst.L; ++l) {
        const auto ll = static_cast<std::size_t>(l);
        for (const auto& qm : q.q) {
            for (int i = 0; i < inst.antennas[ll]; ++i) {
                const auto row = static_cast<std::size_t>(inst.offsets[ll] + i);
                for (std::size_t j = 0; j < qm.dim(); ++j) s[ll] = std::max(s[ll], std::abs(qm(row, j)));
            }
        }
    }
    return s;
}

MethodOutcome linf_pipeline(const NetworkInstance& inst, const PipelineConfig& cfg, std::uint64_t seed) {
    const LinfStageResult st = solve_linf_stage(inst, cfg.solver);
    if (st.status != sdp::SolveStatus::Optimal) {
        MethodOutcome out;
        out.failure = std::string("linf stage ") + sdp::to_string(st.status);
        return out;
    }
    MethodOutcome out = finish_from_ordering(inst, ordering_from_scores(linf_scores(inst, st.lifted)), cfg, seed);
    out.objective_trace = {st.objective};
    return out;
}

const char* to_string(Method m) {
    switch (m) {
        case Method::Proposed: return "proposed";
        case Method::Linf: return "linf";
        case Method::Coordinated: return "coordinated";
        case Method::Exhaustive: return "exhaustive";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    for (Method m : {Method::Proposed, Method::Linf, Method::Coordinated, Method::Exhaustive}) {
        if (name == to_string(m)) return m;
    }
    throw ConfigError("unknown method '" + name + "'");
}

MethodOutcome run_method(const NetworkInstance& inst, Method m, const PipelineConfig& cfg, std::uint64_t seed) {
    switch (m) {
        case Method::Proposed: return proposed_pipeline(inst, cfg, seed);
        case Method::Linf: return linf_pipeline(inst, cfg, seed);
        case Method::Coordinated: return coordinated_beamforming(inst, cfg, seed);
        case Method::Exhaustive: return exhaustive_search(inst, cfg, seed);
    }
    throw ModelError("run_method: unknown method");
}

}  // namespace rgsbf
