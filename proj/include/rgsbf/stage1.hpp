// SPDX-License-Identifier: Apache-2.0
//
// Stage one: perturbed alternating minimization of the weighted sparsity
// objective over (Q, lambda) and the simplex weights mu.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rgsbf/lmi.hpp"

namespace rgsbf {

struct SimplexWeights {
    std::vector<double> mu;
    double eps = 1e-3;

    static SimplexWeights uniform(int L, double eps);
};

/// Closed-form minimizer over the simplex:
/// mu_l proportional to sqrt((P_l^c / eta_l) (sum_m Tr(C_lm Q_m) + eps M N)).
SimplexWeights mu_update(const NetworkInstance& inst, const LiftedSolution& q, double eps);

/// sum_l omega_l^2 x_l^2 / mu_l, the quadratic variational form of (sum_l omega_l x_l)^2.
double variational_form(const std::vector<double>& omega, const std::vector<double>& x, const std::vector<double>& mu);

/// Minimizing weights omega_l x_l / sum_j omega_j x_j of the variational form.
std::vector<double> variational_weights(const std::vector<double>& omega, const std::vector<double>& x);

/// 2 sum_l sqrt(P_l^c / eta_l) ||v_l||, with v_l the stacked beamformer coefficients of RRH l.
double group_sparsity_norm(const NetworkInstance& inst, const std::vector<CVector>& group_beams);

struct InnerResult {
    sdp::SolveStatus status = sdp::SolveStatus::MaxIterations;
    LiftedSolution lifted;
    double objective = 0.0;  // including the eps constant
    int solver_iterations = 0;
};

/// minimize R_eps(mu, Q) subject to the QoS blocks, all per-RRH power rows, lambda >= 0, Q >= 0.
InnerResult solve_inner_sdp(const NetworkInstance& inst, const SimplexWeights& mu,
                            const sdp::SolverConfig& solver = {});

/// The inner problem itself, for inspection and external cross-checks.
LiftedModel build_inner_model(const NetworkInstance& inst, const SimplexWeights& mu, double* objective_constant = nullptr);

struct Stage1Config {
    double eps = 1e-3;
    double tolerance = 1e-3;  // absolute change of consecutive objective values
    int max_iterations = 20;
    /// Run one extra alternation after stopping and record how much it changes the objective.
    bool stationarity_probe = false;
    sdp::SolverConfig solver;
};

enum class Stage1Status { Converged, IterationLimit, Infeasible, SolverFailure };
const char* to_string(Stage1Status s);

struct Stage1Result {
    Stage1Status status = Stage1Status::SolverFailure;
    LiftedSolution lifted;  // lifted.objective_trace holds R_eps(mu^[i], Q^[i]) per iteration
    SimplexWeights weights;  // weights used for the final Q
    int iterations = 0;
    /// Set when an inner solve stopped without an optimal point and the previous iterate was kept.
    bool solver_warning = false;
    /// Inner solves whose point did not improve on the incumbent; the incumbent was kept.
    int rejected_steps = 0;
    /// Objective change of the extra alternation; negative when not probed.
    double stationarity_change = -1.0;
    std::string diagnostic;
};

Stage1Result run_alternating(const NetworkInstance& inst, const Stage1Config& cfg = {});

/// iteration,objective rows.
void write_trace_csv(std::ostream& out, const std::vector<double>& trace);

}  // namespace rgsbf
