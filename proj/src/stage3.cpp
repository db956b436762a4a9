// SPDX-License-Identifier: Apache-2.0

#include "rgsbf/stage3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "rgsbf/errors.hpp"
#include "rgsbf/rng.hpp"

namespace rgsbf {

namespace {

int rrh_of_antenna(const NetworkInstance& inst, int antenna) {
    for (int l = 0; l < inst.L; ++l) {
        const int lo = inst.offsets[static_cast<std::size_t>(l)];
        if (antenna >= lo && antenna < lo + inst.antennas[static_cast<std::size_t>(l)]) return l;
    }
    throw ModelError("antenna index out of range");
}

BeamformingSolution from_group_beams(const NetworkInstance& inst, const std::vector<bool>& active,
                                     const std::vector<CVector>& beams) {
    BeamformingSolution sol = BeamformingSolution::zeros(inst);
    sol.active = active;
    for (int l = 0; l < inst.L; ++l) {
        const auto ll = static_cast<std::size_t>(l);
        if (!active[ll]) continue;
        for (int m = 0; m < inst.M; ++m) {
            sol.v[ll][static_cast<std::size_t>(m)] = beams[static_cast<std::size_t>(m)].segment(inst.offsets[ll], inst.antennas[ll]);
        }
    }
    return sol;
}

CMatrix interference_matrix(const NetworkInstance& inst, const std::vector<CVector>& beams, int k) {
    const auto kk = static_cast<std::size_t>(k);
    const int m = inst.group_of[kk];
    CMatrix g = CMatrix::Zero(inst.N, inst.N);
    for (int i = 0; i < inst.M; ++i) {
        const CVector& v = beams[static_cast<std::size_t>(i)];
        const double coef = i == m ? 1.0 : -inst.gamma[kk];
        g += coef * (v * v.adjoint());
    }
    return g;
}

}  // namespace

SdrResult solve_sdr(const NetworkInstance& inst, const std::vector<bool>& active, const sdp::SolverConfig& solver) {
    SdrResult r;
    if (static_cast<int>(active.size()) != inst.L) throw ModelError("solve_sdr: mask size mismatch");
    if (std::find(active.begin(), active.end(), true) == active.end()) {
        // no transmit antenna left while every MU asks for a positive SINR
        r.status = sdp::SolveStatus::Infeasible;
        return r;
    }
    LiftedModel model = make_lifted_model(inst, active);
    RVector d(model.dim());
    for (int r_ = 0; r_ < model.dim(); ++r_) {
        const int l = rrh_of_antenna(inst, model.rows[static_cast<std::size_t>(r_)]);
        d(r_) = 1.0 / inst.eta[static_cast<std::size_t>(l)];
    }
    sdp::AffineScalar obj;
    for (const auto& q : model.q) obj.traces.push_back({q, sdp::SparseHermitian::diagonal(d)});
    obj.constant = fronthaul_power(inst, active);
    model.problem.set_objective(obj);
    add_qos_lmis(inst, model);
    for (auto& c : build_power_constraints(inst, model, active)) model.problem.add_constraint(std::move(c));

    const sdp::SdpSolution sol = sdp::solve(model.problem, solver);
    r.status = sol.status;
    if (sol.status != sdp::SolveStatus::Optimal) return r;
    r.lifted = extract_lifted(inst, model, sol);
    r.objective = sol.objective_value;
    return r;
}

std::optional<BeamformingSolution> extract_rank_one(const NetworkInstance& inst, const std::vector<bool>& active,
                                                    const LiftedSolution& q, double tol_ratio) {
    std::vector<CVector> beams;
    for (const auto& qm : q.q) {
        const auto eig = eigen_decompose(qm);
        const Eigen::Index n = eig.values.size();
        const double l1 = eig.values(n - 1);
        const double l2 = n >= 2 ? eig.values(n - 2) : 0.0;
        if (l1 <= 0.0) {
            if (l2 < 0.0 || l1 < 0.0) return std::nullopt;
            beams.push_back(CVector::Zero(n));
            continue;
        }
        if (l2 / l1 > tol_ratio) return std::nullopt;
        CVector v = std::sqrt(l1) * eig.vectors.col(n - 1);
        Eigen::Index idx = 0;
        v.cwiseAbs().maxCoeff(&idx);
        if (std::abs(v(idx)) > 0.0) v *= std::conj(v(idx)) / std::abs(v(idx));
        v(idx) = cplx(v(idx).real(), 0.0);
        beams.push_back(v);
    }
    BeamformingSolution sol = from_group_beams(inst, active, beams);
    evaluate_solution(inst, sol);
    return sol;
}

double worst_case_margin(const CVector& h, const HermitianMatrix& theta, const CMatrix& g, double gamma_sigma2) {
    // u = Theta^{1/2} e ranges over the unit ball: minimize u^H A u + 2 Re(b^H u) + c
    const CMatrix t = inv_sqrtm_pd(theta);
    const CMatrix a_mat = t * g * t;
    const CVector b = t * g * h;
    const double c = (h.adjoint() * g * h)(0, 0).real();
    const auto eig = eigen_decompose(CMatrix(0.5 * (a_mat + a_mat.adjoint())));
    const RVector& a = eig.values;
    const RVector beta2 = (eig.vectors.adjoint() * b).cwiseAbs2();
    const double bnorm2 = beta2.sum();
    const double nu_low = std::max(0.0, -a(0));

    // dual function of the trust-region problem; terms with a_i + nu = 0 and beta_i = 0 drop out
    auto dual = [&](double nu) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const double den = a(i) + nu;
            if (den <= 0.0) continue;
            s += beta2(i) / den;
        }
        return c - nu - s;
    };
    auto slope_excess = [&](double nu) {  // phi(nu) - 1 with phi = sum beta^2 / (a + nu)^2
        double s = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const double den = a(i) + nu;
            if (den <= 0.0) {
                if (beta2(i) > 1e-30 * (1.0 + bnorm2)) return std::numeric_limits<double>::infinity();
                continue;
            }
            s += beta2(i) / (den * den);
        }
        return s - 1.0;
    };

    double nu = nu_low;
    if (slope_excess(nu_low) > 0.0) {
        double lo = nu_low;
        double hi = nu_low + std::sqrt(bnorm2) + 1.0;
        while (slope_excess(hi) > 0.0) hi = nu_low + 2.0 * (hi - nu_low);
        for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (slope_excess(mid) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        nu = hi;
    }
    return dual(nu) - gamma_sigma2;
}

double worst_case_margin(const NetworkInstance& inst, const BeamformingSolution& sol, int k) {
    std::vector<CVector> beams;
    for (int m = 0; m < inst.M; ++m) beams.push_back(sol.group_beam(m));
    const auto kk = static_cast<std::size_t>(k);
    return worst_case_margin(inst.h_hat[kk], inst.theta[kk], interference_matrix(inst, beams, k),
                             inst.gamma[kk] * inst.sigma2[kk]);
}

void evaluate_solution(const NetworkInstance& inst, BeamformingSolution& sol) {
    sol.margins.clear();
    for (int k = 0; k < inst.K; ++k) sol.margins.push_back(worst_case_margin(inst, sol, k));
    sol.network_power = network_power(inst, sol);
}

bool satisfies_constraints(const NetworkInstance& inst, const BeamformingSolution& sol, double margin_tol,
                           double power_tol) {
    for (int k = 0; k < inst.K; ++k) {
        if (!(worst_case_margin(inst, sol, k) >= -margin_tol)) return false;
    }
    for (int l = 0; l < inst.L; ++l) {
        const auto ll = static_cast<std::size_t>(l);
        const double p = sol.rrh_power(l);
        if (!sol.active[ll] && p != 0.0) return false;
        if (p > inst.p_max[ll] + power_tol) return false;
    }
    return true;
}

const char* to_string(RecoveryStatus s) {
    switch (s) {
        case RecoveryStatus::RankOne: return "rank_one";
        case RecoveryStatus::Randomized: return "randomized";
        case RecoveryStatus::AllCandidatesInfeasible: return "all_candidates_infeasible";
    }
    return "?";
}

std::optional<BeamformingSolution> rescale_candidate(const NetworkInstance& inst, const std::vector<bool>& active,
                                                     const Candidate& w_in, const RandomizationConfig& cfg) {
    Candidate w = w_in;
    for (auto& wm : w) {
        for (int l = 0; l < inst.L; ++l) {
            const auto ll = static_cast<std::size_t>(l);
            if (!active[ll]) wm.segment(inst.offsets[ll], inst.antennas[ll]).setZero();
        }
    }
    const int n = inst.N;
    double safety = cfg.safety;
    for (int attempt = 0; attempt < 3; ++attempt, safety *= 100.0) {
        sdp::SdpProblem p;
        std::vector<sdp::ScalarVarId> pw;
        std::vector<sdp::ScalarVarId> lam;
        for (int m = 0; m < inst.M; ++m) pw.push_back(p.add_scalar_variable("p" + std::to_string(m), true));
        for (int k = 0; k < inst.K; ++k) lam.push_back(p.add_scalar_variable("lambda" + std::to_string(k), true));

        // per-RRH, per-group power of the unscaled candidate
        std::vector<std::vector<double>> pow_lm(static_cast<std::size_t>(inst.L));
        sdp::AffineScalar obj;
        obj.constant = fronthaul_power(inst, active);
        std::vector<double> group_cost(static_cast<std::size_t>(inst.M), 0.0);
        for (int l = 0; l < inst.L; ++l) {
            const auto ll = static_cast<std::size_t>(l);
            for (int m = 0; m < inst.M; ++m) {
                const double e = w[static_cast<std::size_t>(m)].segment(inst.offsets[ll], inst.antennas[ll]).squaredNorm();
                pow_lm[ll].push_back(e);
                if (active[ll]) group_cost[static_cast<std::size_t>(m)] += e / inst.eta[ll];
            }
        }
        for (int m = 0; m < inst.M; ++m) obj.scalars.push_back({pw[static_cast<std::size_t>(m)], group_cost[static_cast<std::size_t>(m)]});
        p.set_objective(obj);

        for (int k = 0; k < inst.K; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const int gk = inst.group_of[kk];
            sdp::LmiConstraint lmi;
            lmi.label = "qos" + std::to_string(k);
            RVector c = RVector::Zero(n + 1);
            const double gs = inst.gamma[kk] * inst.sigma2[kk];
            c(n) = -(gs * (1.0 + safety) + safety);
            lmi.constant = HermitianMatrix::diagonal(c);
            for (int i = 0; i < inst.M; ++i) {
                CVector u(n + 1);
                u.head(n) = w[static_cast<std::size_t>(i)];
                u(n) = inst.h_hat[kk].dot(w[static_cast<std::size_t>(i)]);  // h^H w
                HermitianMatrix term = HermitianMatrix::outer(u);
                term *= (i == gk ? 1.0 : -inst.gamma[kk]);
                lmi.scalars.push_back({pw[static_cast<std::size_t>(i)], term});
            }
            CMatrix shape = CMatrix::Zero(n + 1, n + 1);
            shape.topLeftCorner(n, n) = inst.theta[kk].dense();
            shape(n, n) = -1.0;
            lmi.scalars.push_back({lam[kk], HermitianMatrix(shape)});
            p.add_lmi(std::move(lmi));
        }
        for (int l = 0; l < inst.L; ++l) {
            const auto ll = static_cast<std::size_t>(l);
            if (!active[ll]) continue;
            sdp::AffineScalar e;
            for (int m = 0; m < inst.M; ++m) {
                if (pow_lm[ll][static_cast<std::size_t>(m)] > 0.0) e.scalars.push_back({pw[static_cast<std::size_t>(m)], pow_lm[ll][static_cast<std::size_t>(m)]});
            }
            if (e.scalars.empty()) continue;
            e.constant = -inst.p_max[ll] * (1.0 - safety);
            p.add_constraint({std::move(e), sdp::Relation::LessEqual, "power" + std::to_string(l)});
        }

        const sdp::SdpSolution sol = sdp::solve(p, cfg.solver);
        if (sol.status != sdp::SolveStatus::Optimal) return std::nullopt;
        std::vector<CVector> beams;
        for (int m = 0; m < inst.M; ++m) {
            beams.push_back(std::sqrt(std::max(sol.value(pw[static_cast<std::size_t>(m)]), 0.0)) * w[static_cast<std::size_t>(m)]);
        }
        BeamformingSolution out = from_group_beams(inst, active, beams);
        evaluate_solution(inst, out);
        if (satisfies_constraints(inst, out)) return out;
    }
    return std::nullopt;
}

RecoveryResult best_candidate(const NetworkInstance& inst, const std::vector<bool>& active,
                              const std::vector<Candidate>& candidates, const RandomizationConfig& cfg) {
    RecoveryResult r;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        ++r.candidates_tried;
        auto s = rescale_candidate(inst, active, c, cfg);
        if (!s) continue;
        ++r.candidates_feasible;
        if (s->network_power < best) {
            best = s->network_power;
            r.solution = std::move(*s);
            r.status = RecoveryStatus::Randomized;
        }
    }
    return r;
}

RecoveryResult gaussian_randomize(const NetworkInstance& inst, const std::vector<bool>& active, const LiftedSolution& q,
                                  const RandomizationConfig& cfg) {
    if (cfg.candidate_count < 1) throw ModelError("gaussian_randomize: candidate_count must be at least 1");
    std::vector<std::pair<RMatrix, CMatrix>> factors;  // sqrt eigenvalues, eigenvectors
    Candidate principal;
    for (const auto& qm : q.q) {
        const auto eig = eigen_decompose(qm);
        factors.emplace_back(eig.values.cwiseMax(0.0).cwiseSqrt(), eig.vectors);
        const Eigen::Index n = eig.values.size();
        principal.push_back(std::sqrt(std::max(eig.values(n - 1), 0.0)) * eig.vectors.col(n - 1));
    }
    std::vector<Candidate> candidates;
    if (cfg.include_principal) candidates.push_back(principal);
    auto rng = substream(cfg.seed, "randomization");
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    for (int c = 0; c < cfg.candidate_count; ++c) {
        Candidate cand;
        for (const auto& [sq, vecs] : factors) {
            CVector z(sq.size());
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                const double re = normal(rng);
                const double im = normal(rng);
                z(i) = cplx(re, im);
            }
            cand.push_back(vecs * (sq.array() * z.array()).matrix());
        }
        candidates.push_back(std::move(cand));
    }
    return best_candidate(inst, active, candidates, cfg);
}

RecoveryResult recover_beamformers(const NetworkInstance& inst, const std::vector<bool>& active, const LiftedSolution& q,
                                   const RandomizationConfig& cfg, double tol_ratio) {
    if (auto sol = extract_rank_one(inst, active, q, tol_ratio)) {
        if (satisfies_constraints(inst, *sol)) {
            RecoveryResult r;
            r.status = RecoveryStatus::RankOne;
            r.solution = std::move(*sol);
            return r;
        }
    }
    return gaussian_randomize(inst, active, q, cfg);
}

void write_solution_csv(std::ostream& out, const NetworkInstance& inst, const BeamformingSolution& sol) {
    const auto old = out.precision(17);
    out << "kind,rrh,group,antenna,re,im,active_mask,network_power,min_margin\n";
    for (int l = 0; l < inst.L; ++l) {
        for (int m = 0; m < inst.M; ++m) {
            const CVector& v = sol.v[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)];
            for (Eigen::Index a = 0; a < v.size(); ++a) {
                out << "beam," << l << ',' << m << ',' << a << ',' << v(a).real() << ',' << v(a).imag() << ",,,\n";
            }
        }
    }
    std::string mask;
    for (bool a : sol.active) mask += a ? '1' : '0';
    out << "summary,,,,,," << mask << ',' << sol.network_power << ',' << sol.min_margin() << '\n';
    out.precision(old);
}

}  // namespace rgsbf
