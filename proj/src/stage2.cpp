// SPDX-License-Identifier: Apache-2.0

#include "rgsbf/stage2.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "rgsbf/errors.hpp"

namespace rgsbf {

RrhOrdering ordering_from_scores(std::vector<double> scores) {
    RrhOrdering o;
    o.theta = std::move(scores);
    o.order.resize(o.theta.size());
    std::iota(o.order.begin(), o.order.end(), 0);
    std::stable_sort(o.order.begin(), o.order.end(),
                     [&](int a, int b) { return o.theta[static_cast<std::size_t>(a)] < o.theta[static_cast<std::size_t>(b)]; });
    return o;
}

RrhOrdering compute_ordering(const NetworkInstance& inst, const LiftedSolution& q) {
    std::vector<double> kappa;
    std::vector<double> theta;
    for (int l = 0; l < inst.L; ++l) {
        const auto ll = static_cast<std::size_t>(l);
        double g = 0.0;
        for (int k = 0; k < inst.K; ++k) g += inst.channel_block(k, l).squaredNorm();
        kappa.push_back(g);
        const double t = std::max(q.block_trace(inst, l), 0.0);
        theta.push_back(std::sqrt(g * inst.eta[ll] / inst.p_fronthaul[ll]) * std::sqrt(t));
    }
    RrhOrdering o = ordering_from_scores(std::move(theta));
    o.kappa = std::move(kappa);
    return o;
}

LiftedModel build_phaselift_model(const NetworkInstance& inst, const std::vector<bool>& active, ZeroHandling zeros) {
    const bool any_active = std::find(active.begin(), active.end(), true) != active.end();
    // with nothing active there is no variable left to eliminate, so the equality form is used
    const bool eliminate = zeros == ZeroHandling::Eliminate && any_active;
    LiftedModel model = eliminate ? make_lifted_model(inst, active) : make_lifted_model(inst);
    add_qos_lmis(inst, model);
    for (auto& c : build_power_constraints(inst, model, active)) model.problem.add_constraint(std::move(c));
    if (!eliminate) {
        std::vector<bool> zero(active.size());
        for (std::size_t l = 0; l < active.size(); ++l) zero[l] = !active[l];
        for (auto& c : build_zero_constraints(inst, model, zero)) model.problem.add_constraint(std::move(c));
    }
    return model;
}

sdp::FeasibilityVerdict phaselift_feasible(const NetworkInstance& inst, const std::vector<bool>& active,
                                           ZeroHandling zeros, const sdp::SolverConfig& solver) {
    if (static_cast<int>(active.size()) != inst.L) throw ModelError("phaselift_feasible: mask size mismatch");
    const LiftedModel model = build_phaselift_model(inst, active, zeros);
    return sdp::check_feasible(model.problem, solver);
}

int max_feasibility_checks(int L) {
    int bits = 0;
    while ((1 << bits) < L + 1) ++bits;
    return 1 + bits;
}

std::vector<bool> active_mask(int L, const std::vector<int>& order, int switched_off) {
    std::vector<bool> active(static_cast<std::size_t>(L), true);
    for (int i = 0; i < switched_off; ++i) active[static_cast<std::size_t>(order.at(static_cast<std::size_t>(i)))] = false;
    return active;
}

SelectionResult binary_search_j0(int L, const SwitchOffOracle& oracle) {
    SelectionResult r;
    std::map<int, bool> seen;
    auto check = [&](int i, bool probe) {
        const sdp::FeasibilityVerdict v = oracle(i);
        ++r.checks;
        r.transcript.push_back({i, v.verdict, v.slack, probe});
        const bool ok = v.verdict == sdp::Verdict::Feasible;
        seen[i] = ok;
        return ok;
    };
    if (!check(0, false)) {
        r.feasible = false;
        r.j0 = 0;
        return r;
    }
    r.feasible = true;
    // invariant: lo is feasible, hi is infeasible (hi = L + 1 stands for "past the end")
    int lo = 0;
    int hi = L + 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (check(mid, false)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    r.j0 = lo;
    if (lo >= 2 && r.checks < max_feasibility_checks(L) && !seen.count(lo - 1)) check(lo - 1, true);
    for (const auto& [i, ok] : seen) {
        if (ok) continue;
        for (const auto& [j, ok2] : seen) {
            if (j > i && ok2) r.monotonicity_violation = true;
        }
    }
    return r;
}

SelectionResult select_active_set(const NetworkInstance& inst, RrhOrdering& ordering, const sdp::SolverConfig& solver) {
    auto oracle = [&](int i) { return phaselift_feasible(inst, active_mask(inst.L, ordering.order, i), ZeroHandling::Eliminate, solver); };
    SelectionResult r = binary_search_j0(inst.L, oracle);
    ordering.j0 = r.feasible ? r.j0 : -1;
    return r;
}

void write_transcript_csv(std::ostream& out, const SelectionResult& r) {
    out << "switched_off,verdict,slack,probe\n";
    const auto old = out.precision(17);
    for (const auto& s : r.transcript) {
        out << s.switched_off << ',' << sdp::to_string(s.verdict) << ',' << s.slack << ',' << (s.probe ? 1 : 0) << '\n';
    }
    out.precision(old);
}

}  // namespace rgsbf
