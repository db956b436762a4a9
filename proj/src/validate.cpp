// SPDX-License-Identifier: Apache-2.0

#include "rgsbf/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "rgsbf/baselines.hpp"
#include "rgsbf/rng.hpp"

namespace rgsbf {

namespace {

CMatrix random_complex(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(n(rng), n(rng));
    }
    return m;
}

HermitianMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
    const CMatrix a = random_complex(rng, n, n);
    return HermitianMatrix(CMatrix(a + a.adjoint()));
}

CheckResult embedding_suite(std::mt19937_64& rng, int count) {
    double worst = 0.0;
    for (int c = 0; c < count; ++c) {
        const Eigen::Index n = 1 + c % 6;
        const HermitianMatrix a = random_hermitian(rng, n);
        const RVector ev = eigen_decompose(a).values;
        Eigen::SelfAdjointEigenSolver<RMatrix> es(embed(a).dense(), Eigen::EigenvaluesOnly);
        const RVector big = es.eigenvalues();
        for (Eigen::Index i = 0; i < n; ++i) {
            worst = std::max({worst, std::abs(big(2 * i) - ev(i)), std::abs(big(2 * i + 1) - ev(i))});
        }
    }
    return {"embedding spectra", worst <= 1e-10, worst, 1e-10, std::to_string(count) + " matrices"};
}

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

CheckResult solver_suite(std::mt19937_64& rng, int count) {
    double worst = 0.0;
    int solved = 0;
    for (int c = 0; c < count; ++c) {
        const Eigen::Index n = 2 + c % 4;
        const bool real = c % 2 == 1;
        // min Tr(C X) subject to Tr X = 1, X >= 0 has optimum lambda_min(C)
        HermitianMatrix cm = random_hermitian(rng, n);
        if (real) cm = HermitianMatrix(CMatrix(cm.dense().real().cast<cplx>()));
        sdp::SdpProblem p;
        const auto x = p.add_matrix_variable("X", static_cast<std::size_t>(n), real ? sdp::Field::Real : sdp::Field::Complex);
        p.set_objective({{{x, sdp::SparseHermitian::from_dense(cm)}}, {}, 0.0});
        p.add_constraint({{{{x, sdp::SparseHermitian::from_dense(HermitianMatrix::identity(static_cast<std::size_t>(n)))}}, {}, -1.0},
                          sdp::Relation::Equal, "trace"});
        const auto s = sdp::solve(p);
        if (s.status == sdp::SolveStatus::Optimal) ++solved;
        worst = std::max(worst, rel(s.objective_value, min_eigenvalue(cm)));
    }
    for (int c = 0; c < count; ++c) {
        // min t subject to [[t, z], [conj z, 1]] >= 0 has optimum |z|^2
        const cplx z = random_complex(rng, 1, 1)(0, 0);
        sdp::SdpProblem p;
        const auto t = p.add_scalar_variable("t", false);
        sdp::LmiConstraint lmi;
        CMatrix c0 = CMatrix::Zero(2, 2);
        c0(0, 1) = z;
        c0(1, 0) = std::conj(z);
        c0(1, 1) = 1.0;
        lmi.constant = HermitianMatrix(c0);
        lmi.scalars.push_back({t, HermitianMatrix::diagonal(RVector::Unit(2, 0))});
        p.add_lmi(std::move(lmi));
        p.set_objective({{}, {{t, 1.0}}, 0.0});
        const auto s = sdp::solve(p);
        if (s.status == sdp::SolveStatus::Optimal) ++solved;
        worst = std::max(worst, rel(s.objective_value, std::norm(z)));
    }
    const bool ok = worst <= 1e-5 && solved == 2 * count;
    return {"analytic SDPs", ok, worst, 1e-5, std::to_string(solved) + "/" + std::to_string(2 * count) + " optimal"};
}

CheckResult identity_suite(std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> u(0.05, 3.0);
    double worst = 0.0;
    for (int c = 0; c < count; ++c) {
        const std::size_t l = 2 + static_cast<std::size_t>(c % 8);
        std::vector<double> omega(l);
        std::vector<double> x(l);
        double lin = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            omega[i] = u(rng);
            x[i] = u(rng);
            lin += omega[i] * x[i];
        }
        const double v = variational_form(omega, x, variational_weights(omega, x));
        worst = std::max(worst, std::abs(v - lin * lin) / (lin * lin));
    }
    return {"variational identity", worst <= 1e-10, worst, 1e-10, std::to_string(count) + " pairs"};
}

CheckResult robustness_suite(std::uint64_t seed, int instances, int samples, double injected) {
    const ScenarioSpec spec = scenario_one();
    auto rng = substream(seed, "robustness");
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = std::numeric_limits<double>::infinity();
    int solved = 0;
    for (int i = 0; i < instances; ++i) {
        const NetworkInstance inst = generate_instance(spec, seed + static_cast<std::uint64_t>(i), 2.0 * (i % 5));
        LiftedModel model = make_lifted_model(inst);
        model.problem.set_objective(build_gs_objective(inst, model, SimplexWeights::uniform(inst.L, 1e-3).mu, 1e-3).linear);
        for (int k = 0; k < inst.K; ++k) {
            sdp::LmiConstraint lmi = build_qos_lmi(inst, model, k);
            // a loosened cone test accepts blocks down to -injected * I
            if (injected > 0.0) lmi.constant += HermitianMatrix::diagonal(RVector::Constant(static_cast<Eigen::Index>(lmi.dim()), injected));
            model.problem.add_lmi(std::move(lmi));
        }
        for (auto& c : build_power_constraints(inst, model, std::vector<bool>(static_cast<std::size_t>(inst.L), true))) {
            model.problem.add_constraint(std::move(c));
        }
        const sdp::SdpSolution sol = sdp::solve(model.problem);
        if (sol.status != sdp::SolveStatus::Optimal) continue;
        const LiftedSolution lifted = extract_lifted(inst, model, sol);
        ++solved;
        for (int k = 0; k < inst.K; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const int m = inst.group_of[kk];
            CMatrix g = CMatrix::Zero(inst.N, inst.N);
            for (int j = 0; j < inst.M; ++j) {
                g += (j == m ? 1.0 : -inst.gamma[kk]) * lifted.q[static_cast<std::size_t>(j)].dense();
            }
            const CMatrix t = inv_sqrtm_pd(inst.theta[kk]);
            // a quarter of the boundary points cluster around the steepest-descent direction at h_hat
            const CVector b = t * g * inst.h_hat[kk];
            const CVector down = b.norm() > 0.0 ? CVector(-b / b.norm()) : CVector(CVector::Zero(inst.N));
            for (int s = 0; s < samples; ++s) {
                CVector u(inst.N);
                for (Eigen::Index a = 0; a < u.size(); ++a) u(a) = cplx(n(rng), n(rng));
                u /= u.norm();
                if (s % 4 == 2) u = down + 0.3 * unif(rng) * u;
                u /= u.norm();
                if (s % 2 == 1) u *= std::pow(unif(rng), 1.0 / (2.0 * inst.N));
                const CVector h = inst.h_hat[kk] + t * u;
                const double val = (h.adjoint() * g * h)(0, 0).real() - inst.gamma[kk] * inst.sigma2[kk];
                worst = std::min(worst, val);
            }
        }
    }
    const bool ok = solved == instances && worst >= -1e-6;
    return {"sampled QoS robustness", ok, worst, -1e-6,
            std::to_string(solved) + "/" + std::to_string(instances) + " solved, " + std::to_string(samples) +
                " samples per MU"};
}

CheckResult margin_suite(std::uint64_t seed, int instances, long samples) {
    auto rng = substream(seed, "margin-oracle");
    std::uniform_real_distribution<double> unif(0.05, 0.5);
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
        const CVector h = random_complex(rng, 3, 1).col(0);
        const double eps = unif(rng);
        const CMatrix s = random_complex(rng, 3, 3);
        const HermitianMatrix theta(CMatrix((s * s.adjoint() / 3.0 + 0.5 * CMatrix::Identity(3, 3)) / (eps * eps)));
        const CMatrix v = random_complex(rng, 3, 3);
        CMatrix g = v.col(0) * v.col(0).adjoint() - 0.3 * (v.col(1) * v.col(1).adjoint() + v.col(2) * v.col(2).adjoint());
        const double trs = worst_case_margin(h, theta, g, 0.1);
        const double grid = sampled_margin(h, theta, g, 0.1, samples, rng);
        worst = std::max(worst, std::abs(trs - grid));
    }
    return {"worst-case margin vs sampling", worst <= 1e-4, worst, 1e-4,
            std::to_string(instances) + " instances, " + std::to_string(samples) + " samples"};
}

CheckResult exhaustive_suite(std::uint64_t seed, int instances) {
    const ScenarioSpec spec = scenario_one();
    PipelineConfig cfg;
    double worst = -std::numeric_limits<double>::infinity();
    int compared = 0;
    for (int i = 0; i < instances; ++i) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
        const NetworkInstance inst = generate_instance(spec, s, 2.0 * (i % 5));
        const MethodOutcome p = proposed_pipeline(inst, cfg, s);
        const MethodOutcome e = exhaustive_search(inst, cfg, s);
        if (!p.ok || !e.ok) continue;
        ++compared;
        worst = std::max(worst, e.solution.network_power - p.solution.network_power);
    }
    return {"exhaustive <= proposed", compared == instances && worst <= 1e-6, worst, 1e-6,
            std::to_string(compared) + "/" + std::to_string(instances) + " compared"};
}

}  // namespace

double sampled_margin(const CVector& h, const HermitianMatrix& theta, const CMatrix& g, double gamma_sigma2,
                      long samples, std::mt19937_64& rng) {
    const Eigen::Index n = h.size();
    const CMatrix t = inv_sqrtm_pd(theta);
    const CMatrix a = t * g * t;
    const CVector b = t * g * h;
    const double c = (h.adjoint() * g * h)(0, 0).real();
    auto f = [&](const CVector& u) { return (u.adjoint() * a * u)(0, 0).real() + 2.0 * b.dot(u).real() + c; };
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const long refine_budget = std::max<long>(samples / 10, 100);
    const long coarse = samples - refine_budget;
    constexpr int kKeep = 8;
    // max-heap of the best kKeep points
    auto cmp = [](const std::pair<double, CVector>& x, const std::pair<double, CVector>& y) { return x.first < y.first; };
    std::priority_queue<std::pair<double, CVector>, std::vector<std::pair<double, CVector>>, decltype(cmp)> best(cmp);
    for (long s = 0; s < coarse; ++s) {
        CVector u(n);
        for (Eigen::Index i = 0; i < n; ++i) u(i) = cplx(nd(rng), nd(rng));
        u /= u.norm();
        if (s % 2 == 1) u *= std::pow(unif(rng), 1.0 / (2.0 * static_cast<double>(n)));
        const double v = f(u);
        if (static_cast<int>(best.size()) < kKeep) {
            best.emplace(v, u);
        } else if (v < best.top().first) {
            best.pop();
            best.emplace(v, u);
        }
    }
    double out = std::numeric_limits<double>::infinity();
    const double step = 0.5 / std::max(1e-12, a.norm());
    const long per_start = refine_budget / kKeep;
    while (!best.empty()) {
        CVector u = best.top().second;
        out = std::min(out, best.top().first);
        best.pop();
        for (long it = 0; it < per_start; ++it) {
            CVector next = u - step * (a * u + b);
            const double nn = next.norm();
            if (nn > 1.0) next /= nn;
            u = next;
        }
        out = std::min(out, f(u));
    }
    return out - gamma_sigma2;
}

std::vector<CheckResult> run_validation(const ValidationOptions& opt) {
    const bool full = opt.level == ValidationLevel::Full;
    auto rng = substream(opt.seed, "validate");
    std::vector<CheckResult> out;
    out.push_back(embedding_suite(rng, full ? 500 : 60));
    out.push_back(solver_suite(rng, full ? 20 : 6));
    out.push_back(identity_suite(rng, 1000));
    out.push_back(robustness_suite(opt.seed, full ? 100 : 8, full ? 10000 : 2000, opt.injected_tolerance));
    out.push_back(margin_suite(opt.seed, full ? 50 : 10, full ? 1000000 : 100000));
    if (full) out.push_back(exhaustive_suite(opt.seed, 10));
    return out;
}

}  // namespace rgsbf
