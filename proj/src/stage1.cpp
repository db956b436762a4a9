// SPDX-License-Identifier: Apache-2.0

#include "rgsbf/stage1.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rgsbf/errors.hpp"

namespace rgsbf {

SimplexWeights SimplexWeights::uniform(int L, double eps) {
    SimplexWeights w;
    w.mu.assign(static_cast<std::size_t>(L), 1.0 / L);
    w.eps = eps;
    return w;
}

std::vector<double> variational_weights(const std::vector<double>& omega, const std::vector<double>& x) {
    double total = 0.0;
    for (std::size_t l = 0; l < omega.size(); ++l) total += omega[l] * x[l];
    std::vector<double> mu(omega.size());
    for (std::size_t l = 0; l < omega.size(); ++l) mu[l] = omega[l] * x[l] / total;
    return mu;
}

double variational_form(const std::vector<double>& omega, const std::vector<double>& x, const std::vector<double>& mu) {
    double v = 0.0;
    for (std::size_t l = 0; l < omega.size(); ++l) v += omega[l] * omega[l] * x[l] * x[l] / mu[l];
    return v;
}

SimplexWeights mu_update(const NetworkInstance& inst, const LiftedSolution& q, double eps) {
    if (!(eps > 0.0)) throw ModelError("mu_update: eps must be positive");
    // R_eps = sum_l (2 sqrt(w_l s_l))^2 / mu_l with w_l = P_l^c / eta_l and s_l the perturbed block trace
    std::vector<double> omega;
    std::vector<double> x;
    const auto traces = q.block_traces(inst);
    for (int l = 0; l < inst.L; ++l) {
        const auto ll = static_cast<std::size_t>(l);
        omega.push_back(std::sqrt(inst.p_fronthaul[ll] / inst.eta[ll]));
        x.push_back(std::sqrt(std::max(traces[ll], 0.0) + eps * inst.M * inst.N));
    }
    SimplexWeights w;
    w.eps = eps;
    w.mu = variational_weights(omega, x);
    for (auto& m : w.mu) m = std::max(m, 1e-300);
    return w;
}

double group_sparsity_norm(const NetworkInstance& inst, const std::vector<CVector>& group_beams) {
    double s = 0.0;
    for (int l = 0; l < inst.L; ++l) {
        const auto ll = static_cast<std::size_t>(l);
        double block = 0.0;
        for (const auto& v : group_beams) block += v.segment(inst.offsets[ll], inst.antennas[ll]).squaredNorm();
        s += std::sqrt(inst.p_fronthaul[ll] / inst.eta[ll]) * std::sqrt(block);
    }
    return 2.0 * s;
}

LiftedModel build_inner_model(const NetworkInstance& inst, const SimplexWeights& mu, double* objective_constant) {
    LiftedModel model = make_lifted_model(inst);
    const GsObjective obj = build_gs_objective(inst, model, mu.mu, mu.eps);
    model.problem.set_objective(obj.linear);
    add_qos_lmis(inst, model);
    for (auto& c : build_power_constraints(inst, model, std::vector<bool>(static_cast<std::size_t>(inst.L), true))) {
        model.problem.add_constraint(std::move(c));
    }
    if (objective_constant) *objective_constant = obj.constant;
    return model;
}

InnerResult solve_inner_sdp(const NetworkInstance& inst, const SimplexWeights& mu, const sdp::SolverConfig& solver) {
    double constant = 0.0;
    const LiftedModel model = build_inner_model(inst, mu, &constant);
    const sdp::SdpSolution sol = sdp::solve(model.problem, solver);
    InnerResult r;
    r.status = sol.status;
    r.solver_iterations = sol.iterations;
    if (sol.status != sdp::SolveStatus::Optimal) return r;
    r.lifted = extract_lifted(inst, model, sol);
    r.objective = sol.objective_value + constant;
    return r;
}

const char* to_string(Stage1Status s) {
    switch (s) {
        case Stage1Status::Converged: return "converged";
        case Stage1Status::IterationLimit: return "iteration_limit";
        case Stage1Status::Infeasible: return "infeasible";
        case Stage1Status::SolverFailure: return "solver_failure";
    }
    return "?";
}

Stage1Result run_alternating(const NetworkInstance& inst, const Stage1Config& cfg) {
    Stage1Result res;
    SimplexWeights mu = SimplexWeights::uniform(inst.L, cfg.eps);
    InnerResult first = solve_inner_sdp(inst, mu, cfg.solver);
    res.iterations = 1;
    if (first.status == sdp::SolveStatus::Infeasible) {
        res.status = Stage1Status::Infeasible;
        res.diagnostic = "first inner problem infeasible";
        return res;
    }
    if (first.status != sdp::SolveStatus::Optimal) {
        res.status = Stage1Status::SolverFailure;
        res.diagnostic = std::string("first inner problem: ") + sdp::to_string(first.status);
        return res;
    }
    LiftedSolution q = std::move(first.lifted);
    std::vector<double> trace{gs_objective_value(inst, q.block_traces(inst), mu.mu, mu.eps)};

    res.status = Stage1Status::IterationLimit;
    while (res.iterations < cfg.max_iterations) {
        const SimplexWeights next_mu = mu_update(inst, q, cfg.eps);
        InnerResult r = solve_inner_sdp(inst, next_mu, cfg.solver);
        ++res.iterations;
        if (r.status != sdp::SolveStatus::Optimal) {
            res.solver_warning = true;
            res.diagnostic = std::string("inner problem ") + std::to_string(res.iterations) + ": " + sdp::to_string(r.status);
            break;
        }
        const double candidate = gs_objective_value(inst, r.lifted.block_traces(inst), next_mu.mu, next_mu.eps);
        const double incumbent = gs_objective_value(inst, q.block_traces(inst), next_mu.mu, next_mu.eps);
        double value = candidate;
        if (candidate > incumbent) {
            // the previous Q is feasible for this inner problem and scores better
            ++res.rejected_steps;
            value = incumbent;
        } else {
            q = std::move(r.lifted);
        }
        mu = next_mu;
        trace.push_back(value);
        if (std::abs(trace[trace.size() - 1] - trace[trace.size() - 2]) < cfg.tolerance) {
            res.status = Stage1Status::Converged;
            break;
        }
    }
    if (cfg.stationarity_probe && !res.solver_warning) {
        const SimplexWeights probe_mu = mu_update(inst, q, cfg.eps);
        const InnerResult r = solve_inner_sdp(inst, probe_mu, cfg.solver);
        if (r.status == sdp::SolveStatus::Optimal) {
            const double value = std::min(gs_objective_value(inst, r.lifted.block_traces(inst), probe_mu.mu, probe_mu.eps),
                                          gs_objective_value(inst, q.block_traces(inst), probe_mu.mu, probe_mu.eps));
            res.stationarity_change = std::abs(value - trace.back());
        }
    }
    res.lifted = std::move(q);
    res.lifted.objective_trace = std::move(trace);
    res.weights = mu;
    return res;
}

void write_trace_csv(std::ostream& out, const std::vector<double>& trace) {
    out << "iteration,objective\n";
    const auto old = out.precision(17);
    for (std::size_t i = 0; i < trace.size(); ++i) out << i << ',' << trace[i] << '\n';
    out.precision(old);
}

}  // namespace rgsbf
