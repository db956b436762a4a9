// SPDX-License-Identifier: Apache-2.0
//
// Builders for the lifted (Q_m = v_m v_m^H) problems: robust QoS LMIs via the
// S-lemma, per-RRH power rows, zero-power rows and the sparsity objectives.

#pragma once

#include <vector>

#include "rgsbf/network.hpp"
#include "rgsbf/sdp.hpp"

namespace rgsbf {

/// Diagonal 0/1 selector C_l of RRH l (the same for every group).
HermitianMatrix block_selector(const NetworkInstance& inst, int l);

/// An SdpProblem holding one matrix variable per group and one multiplier per MU.
///
/// With `lifted_rrhs` a strict subset of RRHs, each Q_m is parameterized only on
/// the antennas of those RRHs (Q_m = P^T X_m P); the remaining rows and columns
/// are identically zero. Otherwise Q_m spans all N antennas.
struct LiftedModel {
    sdp::SdpProblem problem;
    std::vector<sdp::MatrixVarId> q;
    std::vector<sdp::ScalarVarId> lambda;
    std::vector<bool> lifted_rrhs;
    std::vector<int> rows;  // global antenna index of each row of X_m

    int dim() const { return static_cast<int>(rows.size()); }
};

LiftedModel make_lifted_model(const NetworkInstance& inst, const std::vector<bool>& lifted_rrhs);
LiftedModel make_lifted_model(const NetworkInstance& inst);

/// Robust QoS block of MU k:
///   [[G, G h],[h^H G, h^H G h - gamma sigma^2]] + lambda_k [[Theta, 0],[0, -1]] >= 0,
///   G = Q_m - gamma_k sum_{i != m} Q_i.
/// `extra_margin` raises the gamma sigma^2 term (used to keep recovered solutions strictly inside).
sdp::LmiConstraint build_qos_lmi(const NetworkInstance& inst, const LiftedModel& model, int k, double extra_margin = 0.0);

/// Adds the QoS block of every MU to the model.
void add_qos_lmis(const NetworkInstance& inst, LiftedModel& model, double extra_margin = 0.0);

/// sum_m Tr(C_lm Q_m) <= P_l for every active l.
std::vector<sdp::LinearConstraint> build_power_constraints(const NetworkInstance& inst, const LiftedModel& model,
                                                           const std::vector<bool>& active);

/// sum_m Tr(C_lm Q_m) == 0 for every l in `zero`.
std::vector<sdp::LinearConstraint> build_zero_constraints(const NetworkInstance& inst, const LiftedModel& model,
                                                          const std::vector<bool>& zero);

/// Linear part of the weighted sparsity objective plus its constant (the eps I_N trace term).
struct GsObjective {
    sdp::AffineScalar linear;  // constant field left at 0
    double constant = 0.0;
};

/// 4 sum_l (P_l^c / (eta_l mu_l)) (sum_m Tr(C_lm Q_m) + eps M N)
GsObjective build_gs_objective(const NetworkInstance& inst, const LiftedModel& model, const std::vector<double>& mu,
                               double eps);

/// Value of the weighted sparsity objective at given per-RRH block traces t_l = sum_m Tr(C_lm Q_m).
double gs_objective_value(const NetworkInstance& inst, const std::vector<double>& block_traces,
                          const std::vector<double>& mu, double eps);

/// Number of facets of the polygon bounding |z| in the l1/linf objective.
inline constexpr int kModulusFacets = 24;

/// Adds scalars t_{l1,l2} >= |Q_m(i,j)| (polygonal outer bound, all m and entries of the
/// (l1,l2) block) to the model and returns the objective sum_{l1,l2} t_{l1,l2}.
sdp::AffineScalar build_linf_objective(const NetworkInstance& inst, LiftedModel& model);

/// Exact value of sum_{l1,l2} max_m max_{i in l1, j in l2} |Q_m(i,j)|.
double linf_objective_value(const NetworkInstance& inst, const std::vector<HermitianMatrix>& q);

/// Q_m, lambda_k and the objective history of a lifted problem, with Q_m on all N antennas.
struct LiftedSolution {
    std::vector<HermitianMatrix> q;
    std::vector<double> lambda;
    std::vector<double> objective_trace;

    /// sum_m Tr(C_lm Q_m)
    double block_trace(const NetworkInstance& inst, int l) const;
    std::vector<double> block_traces(const NetworkInstance& inst) const;
};

LiftedSolution extract_lifted(const NetworkInstance& inst, const LiftedModel& model, const sdp::SdpSolution& sol);

}  // namespace rgsbf
