// SPDX-License-Identifier: Apache-2.0

#include "rgsbf/lmi.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rgsbf/errors.hpp"

namespace rgsbf {

using sdp::AffineScalar;
using sdp::LinearConstraint;
using sdp::LmiConstraint;
using sdp::Relation;
using sdp::SparseHermitian;

HermitianMatrix block_selector(const NetworkInstance& inst, int l) {
    RVector d = RVector::Zero(inst.N);
    d.segment(inst.offsets[static_cast<std::size_t>(l)], inst.antennas[static_cast<std::size_t>(l)]).setOnes();
    return HermitianMatrix::diagonal(d);
}

LiftedModel make_lifted_model(const NetworkInstance& inst, const std::vector<bool>& lifted_rrhs) {
    if (static_cast<int>(lifted_rrhs.size()) != inst.L) throw ModelError("lifted model: RRH mask size mismatch");
    LiftedModel model;
    model.lifted_rrhs = lifted_rrhs;
    for (int l = 0; l < inst.L; ++l) {
        if (!lifted_rrhs[static_cast<std::size_t>(l)]) continue;
        for (int a = 0; a < inst.antennas[static_cast<std::size_t>(l)]; ++a) model.rows.push_back(inst.offsets[static_cast<std::size_t>(l)] + a);
    }
    if (model.rows.empty()) throw ModelError("lifted model: no RRH carries a variable");
    for (int m = 0; m < inst.M; ++m) {
        model.q.push_back(model.problem.add_matrix_variable("Q" + std::to_string(m), model.rows.size()));
    }
    for (int k = 0; k < inst.K; ++k) {
        model.lambda.push_back(model.problem.add_scalar_variable("lambda" + std::to_string(k), true));
    }
    return model;
}

LiftedModel make_lifted_model(const NetworkInstance& inst) {
    return make_lifted_model(inst, std::vector<bool>(static_cast<std::size_t>(inst.L), true));
}

LmiConstraint build_qos_lmi(const NetworkInstance& inst, const LiftedModel& model, int k, double extra_margin) {
    const auto kk = static_cast<std::size_t>(k);
    const int n = inst.N;
    const int m = inst.group_of.at(kk);
    const double gamma = inst.gamma[kk];

    // rows of W = [I_N, h] restricted to the lifted antennas
    CMatrix w = CMatrix::Zero(model.dim(), n + 1);
    for (int r = 0; r < model.dim(); ++r) {
        const int g = model.rows[static_cast<std::size_t>(r)];
        w(r, g) = 1.0;
        w(r, n) = inst.h_hat[kk](g);
    }

    LmiConstraint lmi;
    lmi.label = "qos" + std::to_string(k);
    RVector c = RVector::Zero(n + 1);
    c(n) = -(gamma * inst.sigma2[kk] + extra_margin);
    lmi.constant = HermitianMatrix::diagonal(c);
    for (int i = 0; i < inst.M; ++i) {
        lmi.congruences.push_back({model.q[static_cast<std::size_t>(i)], i == m ? 1.0 : -gamma, w});
    }
    CMatrix shape = CMatrix::Zero(n + 1, n + 1);
    shape.topLeftCorner(n, n) = inst.theta[kk].dense();
    shape(n, n) = -1.0;
    lmi.scalars.push_back({model.lambda[kk], HermitianMatrix(shape)});
    return lmi;
}

void add_qos_lmis(const NetworkInstance& inst, LiftedModel& model, double extra_margin) {
    for (int k = 0; k < inst.K; ++k) model.problem.add_lmi(build_qos_lmi(inst, model, k, extra_margin));
}

namespace {

// sum_m Tr(C_l Q_m) expressed in the model's variables; empty when RRH l is not lifted.
AffineScalar rrh_power_expr(const NetworkInstance& inst, const LiftedModel& model, int l) {
    AffineScalar e;
    SparseHermitian sel;
    sel.dim = static_cast<std::size_t>(model.dim());
    const int lo = inst.offsets[static_cast<std::size_t>(l)];
    const int hi = lo + inst.antennas[static_cast<std::size_t>(l)];
    for (int r = 0; r < model.dim(); ++r) {
        const int g = model.rows[static_cast<std::size_t>(r)];
        if (g >= lo && g < hi) sel.add(static_cast<std::size_t>(r), static_cast<std::size_t>(r), 1.0);
    }
    if (sel.entries.empty()) return e;
    for (const auto& q : model.q) e.traces.push_back({q, sel});
    return e;
}

}  // namespace

std::vector<LinearConstraint> build_power_constraints(const NetworkInstance& inst, const LiftedModel& model,
                                                      const std::vector<bool>& active) {
    std::vector<LinearConstraint> out;
    for (int l = 0; l < inst.L; ++l) {
        if (!active.at(static_cast<std::size_t>(l))) continue;
        AffineScalar e = rrh_power_expr(inst, model, l);
        if (e.traces.empty()) continue;
        e.constant = -inst.p_max[static_cast<std::size_t>(l)];
        out.push_back({std::move(e), Relation::LessEqual, "power" + std::to_string(l)});
    }
    return out;
}

std::vector<LinearConstraint> build_zero_constraints(const NetworkInstance& inst, const LiftedModel& model,
                                                     const std::vector<bool>& zero) {
    std::vector<LinearConstraint> out;
    for (int l = 0; l < inst.L; ++l) {
        if (!zero.at(static_cast<std::size_t>(l))) continue;
        AffineScalar e = rrh_power_expr(inst, model, l);
        if (e.traces.empty()) continue;
        out.push_back({std::move(e), Relation::Equal, "zero" + std::to_string(l)});
    }
    return out;
}

GsObjective build_gs_objective(const NetworkInstance& inst, const LiftedModel& model, const std::vector<double>& mu,
                               double eps) {
    if (static_cast<int>(mu.size()) != inst.L) throw ModelError("gs objective: weight vector size mismatch");
    GsObjective obj;
    for (int l = 0; l < inst.L; ++l) {
        const auto ll = static_cast<std::size_t>(l);
        if (!(mu[ll] > 0.0)) throw ModelError("gs objective: weights must be positive");
        const double w = 4.0 * inst.p_fronthaul[ll] / (inst.eta[ll] * mu[ll]);
        obj.constant += w * eps * inst.M * inst.N;
        AffineScalar e = rrh_power_expr(inst, model, l);
        for (auto& t : e.traces) {
            for (auto& entry : t.coefficient.entries) entry.value *= w;
            obj.linear.traces.push_back(std::move(t));
        }
    }
    return obj;
}

double gs_objective_value(const NetworkInstance& inst, const std::vector<double>& block_traces,
                          const std::vector<double>& mu, double eps) {
    double v = 0.0;
    for (int l = 0; l < inst.L; ++l) {
        const auto ll = static_cast<std::size_t>(l);
        v += 4.0 * inst.p_fronthaul[ll] / (inst.eta[ll] * mu[ll]) * (block_traces[ll] + eps * inst.M * inst.N);
    }
    return v;
}

sdp::AffineScalar build_linf_objective(const NetworkInstance& inst, LiftedModel& model) {
    AffineScalar obj;
    const double inv_cos = 1.0 / std::cos(std::numbers::pi / kModulusFacets);
    const auto n = static_cast<std::size_t>(model.dim());
    // rows of the model grouped by RRH
    std::vector<std::vector<std::size_t>> rows_of(static_cast<std::size_t>(inst.L));
    for (std::size_t r = 0; r < n; ++r) {
        const int g = model.rows[r];
        for (int l = 0; l < inst.L; ++l) {
            const int lo = inst.offsets[static_cast<std::size_t>(l)];
            if (g >= lo && g < lo + inst.antennas[static_cast<std::size_t>(l)]) rows_of[static_cast<std::size_t>(l)].push_back(r);
        }
    }
    for (int l1 = 0; l1 < inst.L; ++l1) {
        for (int l2 = l1; l2 < inst.L; ++l2) {
            const auto& r1 = rows_of[static_cast<std::size_t>(l1)];
            const auto& r2 = rows_of[static_cast<std::size_t>(l2)];
            if (r1.empty() || r2.empty()) continue;
            const auto t = model.problem.add_scalar_variable("t" + std::to_string(l1) + "_" + std::to_string(l2), true);
            // the (l2,l1) block holds the conjugate entries, so it shares t
            obj.scalars.push_back({t, l1 == l2 ? 1.0 : 2.0});
            for (const auto& q : model.q) {
                for (std::size_t i : r1) {
                    for (std::size_t j : r2) {
                        if (l1 == l2 && j < i) continue;
                        if (i == j) {
                            AffineScalar row;
                            row.scalars.push_back({t, 1.0});
                            SparseHermitian c;
                            c.dim = n;
                            c.add(i, i, -1.0);
                            row.traces.push_back({q, c});
                            model.problem.add_constraint({std::move(row), Relation::GreaterEqual, "linf"});
                            continue;
                        }
                        for (int f = 0; f < kModulusFacets; ++f) {
                            const double phi = 2.0 * std::numbers::pi * f / kModulusFacets;
                            // Tr(C Q) = 2 Re(conj(c_ij) Q_ij) = Re(e^{-i phi} Q_ij) / cos(pi/F)
                            AffineScalar row;
                            row.scalars.push_back({t, 1.0});
                            SparseHermitian c;
                            c.dim = n;
                            c.add(i, j, -0.5 * inv_cos * std::polar(1.0, phi));
                            row.traces.push_back({q, c});
                            model.problem.add_constraint({std::move(row), Relation::GreaterEqual, "linf"});
                        }
                    }
                }
            }
        }
    }
    return obj;
}

double linf_objective_value(const NetworkInstance& inst, const std::vector<HermitianMatrix>& q) {
    double total = 0.0;
    for (int l1 = 0; l1 < inst.L; ++l1) {
        for (int l2 = 0; l2 < inst.L; ++l2) {
            double best = 0.0;
            for (const auto& qm : q) {
                for (int a = 0; a < inst.antennas[static_cast<std::size_t>(l1)]; ++a) {
                    for (int b = 0; b < inst.antennas[static_cast<std::size_t>(l2)]; ++b) {
                        const auto i = static_cast<std::size_t>(inst.offsets[static_cast<std::size_t>(l1)] + a);
                        const auto j = static_cast<std::size_t>(inst.offsets[static_cast<std::size_t>(l2)] + b);
                        best = std::max(best, std::abs(qm(i, j)));
                    }
                }
            }
            total += best;
        }
    }
    return total;
}

double LiftedSolution::block_trace(const NetworkInstance& inst, int l) const {
    double t = 0.0;
    const auto lo = static_cast<std::size_t>(inst.offsets[static_cast<std::size_t>(l)]);
    const auto n = static_cast<std::size_t>(inst.antennas[static_cast<std::size_t>(l)]);
    for (const auto& qm : q)
        for (std::size_t a = 0; a < n; ++a) t += qm(lo + a, lo + a).real();
    return t;
}

std::vector<double> LiftedSolution::block_traces(const NetworkInstance& inst) const {
    std::vector<double> out;
    for (int l = 0; l < inst.L; ++l) out.push_back(block_trace(inst, l));
    return out;
}

LiftedSolution extract_lifted(const NetworkInstance& inst, const LiftedModel& model, const sdp::SdpSolution& sol) {
    LiftedSolution out;
    for (const auto& id : model.q) {
        const CMatrix x = sol.value(id).dense();
        CMatrix full = CMatrix::Zero(inst.N, inst.N);
        for (int a = 0; a < model.dim(); ++a)
            for (int b = 0; b < model.dim(); ++b) full(model.rows[static_cast<std::size_t>(a)], model.rows[static_cast<std::size_t>(b)]) = x(a, b);
        out.q.emplace_back(full);
    }
    for (const auto& id : model.lambda) out.lambda.push_back(sol.value(id));
    return out;
}

}  // namespace rgsbf
