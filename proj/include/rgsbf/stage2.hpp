// SPDX-License-Identifier: Apache-2.0
//
// Stage two: RRH ordering from the lifted stage-one solution and a bisection
// over the number of switched-off RRHs driven by relaxed feasibility checks.

#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "rgsbf/lmi.hpp"

namespace rgsbf {

struct RrhOrdering {
    std::vector<double> theta;  // switch-off score; smaller goes first
    std::vector<double> kappa;  // sum_k ||h_kl||^2
    std::vector<int> order;     // RRH indices sorted by (theta, index)
    int j0 = -1;
};

/// theta_l = sqrt(kappa_l eta_l / P_l^c) * sqrt(sum_m Tr(C_lm Q_m))
RrhOrdering compute_ordering(const NetworkInstance& inst, const LiftedSolution& q);

/// Ordering by arbitrary per-RRH scores (ascending, ties by index).
RrhOrdering ordering_from_scores(std::vector<double> scores);

/// How switched-off RRHs enter the lifted problems.
enum class ZeroHandling {
    Eliminate,      // Q_m carries no rows or columns for inactive antennas
    TraceEquality,  // full Q_m plus sum_m Tr(C_lm Q_m) = 0 rows
};

/// Phase-I check of: QoS blocks, power rows on `active`, zero power elsewhere, Q >= 0, lambda >= 0.
sdp::FeasibilityVerdict phaselift_feasible(const NetworkInstance& inst, const std::vector<bool>& active,
                                           ZeroHandling zeros = ZeroHandling::Eliminate,
                                           const sdp::SolverConfig& solver = {});

/// The model checked by phaselift_feasible (without the phase-I transformation).
LiftedModel build_phaselift_model(const NetworkInstance& inst, const std::vector<bool>& active, ZeroHandling zeros);

/// 1 + ceil(log2(1 + L))
int max_feasibility_checks(int L);

struct SelectionStep {
    int switched_off = 0;
    sdp::Verdict verdict = sdp::Verdict::Marginal;
    double slack = 0.0;
    bool probe = false;  // monotonicity probe rather than a bisection step
};

struct SelectionResult {
    bool feasible = false;  // false when nothing can be served even with every RRH on
    int j0 = 0;
    int checks = 0;
    bool monotonicity_violation = false;
    std::vector<SelectionStep> transcript;
};

/// Feasibility oracle for "the first i RRHs of the ordering are off".
using SwitchOffOracle = std::function<sdp::FeasibilityVerdict(int i)>;

/// Largest i in [0, L] with a Feasible verdict, assuming feasibility is monotone in i.
/// Marginal verdicts count as infeasible. Uses at most max_feasibility_checks(L) oracle calls;
/// a leftover call probes i = J0 - 1 and flags a violation if it comes back infeasible.
SelectionResult binary_search_j0(int L, const SwitchOffOracle& oracle);

/// Active mask with the first `switched_off` RRHs of `order` off.
std::vector<bool> active_mask(int L, const std::vector<int>& order, int switched_off);

/// Bisection with phaselift_feasible as the oracle; sets ordering.j0.
SelectionResult select_active_set(const NetworkInstance& inst, RrhOrdering& ordering,
                                  const sdp::SolverConfig& solver = {});

/// switched_off,verdict,slack,probe rows.
void write_transcript_csv(std::ostream& out, const SelectionResult& r);

}  // namespace rgsbf
