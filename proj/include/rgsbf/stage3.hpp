// SPDX-License-Identifier: Apache-2.0
//
// Stage three: semidefinite relaxation on a fixed active set, rank-one
// recovery (extraction or Gaussian randomization with a joint power-rescaling
// SDP) and exact worst-case QoS margins.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rgsbf/lmi.hpp"

namespace rgsbf {

struct SdrResult {
    sdp::SolveStatus status = sdp::SolveStatus::MaxIterations;
    LiftedSolution lifted;
    double objective = 0.0;  // sum_{l active} ((1/eta_l) sum_m Tr(C_lm Q_m) + P_l^c)
};

SdrResult solve_sdr(const NetworkInstance& inst, const std::vector<bool>& active, const sdp::SolverConfig& solver = {});

/// v_m = sqrt(lambda_1) u_1 for every group when lambda_2 / lambda_1 <= tol_ratio, with the
/// largest-modulus entry of each v_m made real and nonnegative; nullopt otherwise.
std::optional<BeamformingSolution> extract_rank_one(const NetworkInstance& inst, const std::vector<bool>& active,
                                                    const LiftedSolution& q, double tol_ratio = 1e-6);

/// min over e^H Theta_k e <= 1 of (h_k + e)^H G (h_k + e) - gamma_k sigma_k^2, with
/// G = v_m v_m^H - gamma_k sum_{i != m} v_i v_i^H built from the group beams.
double worst_case_margin(const NetworkInstance& inst, const BeamformingSolution& sol, int k);

/// Same quantity for an explicit Hermitian G (no rank assumption).
double worst_case_margin(const CVector& h, const HermitianMatrix& theta, const CMatrix& g, double gamma_sigma2);

/// Fills margins and network power.
void evaluate_solution(const NetworkInstance& inst, BeamformingSolution& sol);

/// Worst-case margins >= -margin_tol for every MU and per-RRH power <= P_l + power_tol.
bool satisfies_constraints(const NetworkInstance& inst, const BeamformingSolution& sol, double margin_tol = 1e-6,
                           double power_tol = 1e-9);

struct RandomizationConfig {
    int candidate_count = 100;
    std::uint64_t seed = 0;
    /// Added to gamma sigma^2 and subtracted from P_l inside the rescaling problem, relative to each term.
    double safety = 1e-7;
    /// Try the principal-eigenvector beams as an extra candidate ahead of the random draws.
    bool include_principal = true;
    sdp::SolverConfig solver;
};

enum class RecoveryStatus { RankOne, Randomized, AllCandidatesInfeasible };
const char* to_string(RecoveryStatus s);

struct RecoveryResult {
    RecoveryStatus status = RecoveryStatus::AllCandidatesInfeasible;
    BeamformingSolution solution;
    int candidates_tried = 0;
    int candidates_feasible = 0;
};

/// One candidate: w[m] over all N antennas.
using Candidate = std::vector<CVector>;

/// Joint rescaling Q_m <- p_m w_m w_m^H; returns the scaled beams when a feasible p exists.
std::optional<BeamformingSolution> rescale_candidate(const NetworkInstance& inst, const std::vector<bool>& active,
                                                     const Candidate& w, const RandomizationConfig& cfg);

/// Best rescaled candidate out of an explicit list (ties broken by position).
RecoveryResult best_candidate(const NetworkInstance& inst, const std::vector<bool>& active,
                              const std::vector<Candidate>& candidates, const RandomizationConfig& cfg);

/// Draws w_m ~ CN(0, Q_m) candidate_count times (plus the principal beams if enabled).
RecoveryResult gaussian_randomize(const NetworkInstance& inst, const std::vector<bool>& active, const LiftedSolution& q,
                                  const RandomizationConfig& cfg);

/// Extraction when the relaxation is tight and the extracted beams verify, else randomization.
RecoveryResult recover_beamformers(const NetworkInstance& inst, const std::vector<bool>& active, const LiftedSolution& q,
                                   const RandomizationConfig& cfg, double tol_ratio = 1e-6);

/// kind,rrh,group,antenna,re,im,active_mask,network_power,min_margin: one beam row per antenna
/// entry, then a summary row with the active mask as a 0/1 string in RRH order.
void write_solution_csv(std::ostream& out, const NetworkInstance& inst, const BeamformingSolution& sol);

}  // namespace rgsbf
