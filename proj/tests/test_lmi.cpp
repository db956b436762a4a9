// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "rgsbf/lmi.hpp"
#include "rgsbf/stage1.hpp"
#include "rgsbf/validate.hpp"
#include "support.hpp"

using namespace rgsbf;
using testsupport::random_complex;
using testsupport::small_instance;

namespace {

std::vector<HermitianMatrix> rank_one_q(const std::vector<CVector>& v) {
    std::vector<HermitianMatrix> q;
    for (const auto& x : v) q.push_back(HermitianMatrix::outer(x));
    return q;
}

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

}  // namespace

TEST_CASE("single-group QoS block has the explicit S-lemma form") {
    std::mt19937_64 rng(1);
    const double eps = 0.2;
    auto inst = small_instance(rng, {2, 1}, {1}, eps, 3.0);
    inst.sigma2[0] = 0.7;
    auto model = make_lifted_model(inst);
    const auto lmi = build_qos_lmi(inst, model, 0);
    REQUIRE(lmi.dim() == 4);
    const CMatrix q = testsupport::random_psd(rng, 3, 2);
    const double lam = 0.37;
    std::vector<double> s = zeros(model.problem.scalar_variables().size());
    s[static_cast<std::size_t>(model.lambda[0].index)] = lam;
    const CMatrix got = sdp::evaluate(lmi, {HermitianMatrix(q)}, s).dense();
    const CVector& h = inst.h_hat[0];
    CMatrix want(4, 4);
    want.topLeftCorner(3, 3) = q + lam / (eps * eps) * CMatrix::Identity(3, 3);
    want.topRightCorner(3, 1) = q * h;
    want.bottomLeftCorner(1, 3) = h.adjoint() * q;
    want(3, 3) = (h.adjoint() * q * h)(0, 0) - inst.gamma[0] * 0.7 - lam;
    CHECK((got - want).norm() < 1e-12);
}

TEST_CASE("QoS block dimension is N + 1") {
    const auto inst = generate_instance(scenario_one(), 1, 0.0);
    auto model = make_lifted_model(inst);
    for (int k = 0; k < inst.K; ++k) CHECK(build_qos_lmi(inst, model, k).dim() == 11);
}

TEST_CASE("a PSD QoS block certifies every sampled channel error") {
    std::mt19937_64 rng(2);
    int certified = 0;
    for (int trial = 0; trial < 40; ++trial) {
        auto inst = small_instance(rng, {2, 1}, {1, 1}, 0.15, 0.0);
        auto model = make_lifted_model(inst);
        std::vector<CVector> v;
        for (int m = 0; m < 2; ++m) v.push_back(random_complex(rng, 3, 1).col(0) * (m == 0 ? 2.0 : 0.3));
        const auto q = rank_one_q(v);
        const int k = 0;
        const auto lmi = build_qos_lmi(inst, model, k);
        // scan the multiplier for a PSD certificate
        for (double lam = 0.0; lam < 20.0; lam += 0.01) {
            std::vector<double> s = zeros(model.problem.scalar_variables().size());
            s[static_cast<std::size_t>(model.lambda[0].index)] = lam;
            if (min_eigenvalue(sdp::evaluate(lmi, q, s)) < 0.0) continue;
            ++certified;
            const CMatrix g = q[0].dense() - inst.gamma[0] * q[1].dense();
            auto srng = std::mt19937_64(static_cast<std::uint64_t>(trial));
            const double sampled = sampled_margin(inst.h_hat[0], inst.theta[0], g, inst.gamma[0] * inst.sigma2[0], 10000, srng);
            CHECK(sampled >= -1e-6);
            break;
        }
    }
    CHECK(certified >= 10);
}

TEST_CASE("a comfortable worst-case margin admits a certificate") {
    std::mt19937_64 rng(3);
    int checked = 0;
    for (int trial = 0; trial < 30 && checked < 8; ++trial) {
        auto inst = small_instance(rng, {2, 2}, {1, 1}, 0.1, 0.0);
        std::vector<CVector> v{random_complex(rng, 4, 1).col(0) * 2.0, random_complex(rng, 4, 1).col(0) * 0.2};
        const auto q = rank_one_q(v);
        const CMatrix g = q[0].dense() - inst.gamma[0] * q[1].dense();
        auto srng = std::mt19937_64(static_cast<std::uint64_t>(trial));
        const double margin = sampled_margin(inst.h_hat[0], inst.theta[0], g, 0.0, 20000, srng);
        if (margin < inst.gamma[0] * inst.sigma2[0] + 0.1) continue;
        ++checked;
        // fix Q and ask the phase-I solver for lambda
        auto model = make_lifted_model(inst);
        auto lmi = build_qos_lmi(inst, model, 0);
        sdp::SdpProblem p;
        const auto lam = p.add_scalar_variable("lambda");
        sdp::LmiConstraint fixed;
        std::vector<double> s0 = zeros(model.problem.scalar_variables().size());
        fixed.constant = sdp::evaluate(lmi, q, s0);
        fixed.scalars.push_back({lam, lmi.scalars[0].coefficient});
        p.add_lmi(fixed);
        CHECK(sdp::check_feasible(p).verdict == sdp::Verdict::Feasible);
    }
    CHECK(checked >= 3);
}

TEST_CASE("power rows follow the active set") {
    std::mt19937_64 rng(4);
    const auto inst = small_instance(rng, {2, 3}, {1}, 0.1, 0.0);
    const auto model = make_lifted_model(inst);
    CHECK(build_power_constraints(inst, model, {false, false}).empty());
    const auto rows = build_power_constraints(inst, model, {true, false});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].relation == sdp::Relation::LessEqual);
    CHECK(rows[0].expr.constant == doctest::Approx(-10.0));
    for (const auto& t : rows[0].expr.traces) {
        for (const auto& e : t.coefficient.entries) {
            CHECK(e.row < 2);
            CHECK(e.col < 2);
        }
    }
    const auto z = build_zero_constraints(inst, model, {false, true});
    REQUIRE(z.size() == 1);
    CHECK(z[0].relation == sdp::Relation::Equal);
}

TEST_CASE("block traces of a rank-one lift are per-RRH beam energies") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = small_instance(rng, {1, 2, 3}, {1, 2}, 0.1, 0.0);
        std::vector<CVector> v{random_complex(rng, 6, 1).col(0), random_complex(rng, 6, 1).col(0)};
        LiftedSolution ls;
        ls.q = rank_one_q(v);
        double total = 0.0;
        for (int l = 0; l < 3; ++l) {
            const auto ll = static_cast<std::size_t>(l);
            double want = 0.0;
            for (const auto& x : v) want += x.segment(inst.offsets[ll], inst.antennas[ll]).squaredNorm();
            CHECK(ls.block_trace(inst, l) == doctest::Approx(want).epsilon(1e-12));
            const auto model = make_lifted_model(inst);
            std::vector<bool> only(3, false);
            only[ll] = true;
            const auto row = build_power_constraints(inst, model, only)[0];
            CHECK(sdp::evaluate(row.expr, ls.q, zeros(model.problem.scalar_variables().size())) ==
                  doctest::Approx(want - 10.0).epsilon(1e-12));
            total += ls.block_trace(inst, l);
        }
        CHECK(total == doctest::Approx(ls.q[0].trace() + ls.q[1].trace()).epsilon(1e-12));
    }
}

TEST_CASE("selectors partition the identity") {
    const auto inst = generate_instance(scenario_two(), 1, 0.0);
    CMatrix sum = CMatrix::Zero(inst.N, inst.N);
    for (int l = 0; l < inst.L; ++l) sum += block_selector(inst, l).dense();
    CHECK((sum - CMatrix::Identity(inst.N, inst.N)).norm() == 0.0);
}

TEST_CASE("sparsity objective coefficients and constant") {
    const auto inst = generate_instance(scenario_one(), 1, 0.0);
    const auto model = make_lifted_model(inst);
    const std::vector<double> mu(5, 0.2);
    const double w = 5.6 / 0.25;
    const auto obj0 = build_gs_objective(inst, model, mu, 0.0);
    CHECK(obj0.constant == 0.0);
    // each Q_m sees the identity scaled by 4 w L when the weights are uniform
    std::vector<CMatrix> per_group(2, CMatrix::Zero(10, 10));
    for (const auto& t : obj0.linear.traces) per_group[static_cast<std::size_t>(t.var.index)] += t.coefficient.to_dense().dense();
    for (const auto& c : per_group) CHECK((c - 4.0 * w * 5.0 * CMatrix::Identity(10, 10)).norm() < 1e-9);
    CHECK(build_gs_objective(inst, model, mu, 1e-3).constant == doctest::Approx(44.8));

    std::mt19937_64 rng(6);
    const auto single = small_instance(rng, {3}, {1, 1}, 0.1, 0.0);
    const auto sm = make_lifted_model(single);
    const auto obj = build_gs_objective(single, sm, {1.0}, 1e-3);
    const auto q = rank_one_q({random_complex(rng, 3, 1).col(0), random_complex(rng, 3, 1).col(0)});
    const double got = sdp::evaluate(obj.linear, q, zeros(sm.problem.scalar_variables().size())) + obj.constant;
    CHECK(got == doctest::Approx(4.0 * w * (q[0].trace() + q[1].trace() + 1e-3 * 2 * 3)).epsilon(1e-12));
}

TEST_CASE("sparsity objective at the optimal weights equals the squared mixed norm") {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto inst = small_instance(rng, {2, 1, 2}, {1, 1}, 0.1, 0.0);
        std::uniform_real_distribution<double> u(1.0, 10.0);
        for (auto& p : inst.p_fronthaul) p = u(rng);
        std::vector<CVector> v{random_complex(rng, 5, 1).col(0), random_complex(rng, 5, 1).col(0)};
        std::vector<double> omega;
        std::vector<double> x;
        for (int l = 0; l < 3; ++l) {
            const auto ll = static_cast<std::size_t>(l);
            omega.push_back(std::sqrt(inst.p_fronthaul[ll] / inst.eta[ll]));
            double e = 0.0;
            for (const auto& b : v) e += b.segment(inst.offsets[ll], inst.antennas[ll]).squaredNorm();
            x.push_back(std::sqrt(e));
        }
        const auto model = make_lifted_model(inst);
        const auto obj = build_gs_objective(inst, model, variational_weights(omega, x), 0.0);
        const double got = sdp::evaluate(obj.linear, rank_one_q(v), zeros(model.problem.scalar_variables().size()));
        const double omega_v = group_sparsity_norm(inst, v);
        worst = std::max(worst, std::abs(got - omega_v * omega_v) / (omega_v * omega_v));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("l1/linf objective: exact value and polygon bound") {
    std::mt19937_64 rng(8);
    const auto inst = small_instance(rng, {2, 2}, {1}, 0.1, 0.0);
    CHECK(linf_objective_value(inst, {HermitianMatrix(4)}) == 0.0);
    const auto diag = HermitianMatrix::diagonal((RVector(4) << 0.5, 2.0, 1.0, 0.25).finished());
    CHECK(linf_objective_value(inst, {diag}) == doctest::Approx(3.0));

    // minimize the polygonal epigraph with Q pinned to a given matrix
    auto solve_pinned = [&](const HermitianMatrix& target) {
        auto model = make_lifted_model(inst);
        model.problem.set_objective(build_linf_objective(inst, model));
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = i; j < 4; ++j) {
                for (int part = 0; part < (i == j ? 1 : 2); ++part) {
                    sdp::SparseHermitian c;
                    c.dim = 4;
                    // Re Tr(C Q) picks Re Q_ij (part 0) or Im Q_ij (part 1)
                    const cplx val = i == j ? cplx(1.0, 0.0) : (part == 0 ? cplx(0.5, 0.0) : cplx(0.0, 0.5));
                    c.add(i, j, val);
                    const double want = part == 0 ? target(i, j).real() : target(i, j).imag();
                    model.problem.add_constraint({{{{model.q[0], c}}, {}, -want}, sdp::Relation::Equal, "pin"});
                }
            }
        }
        return sdp::solve(model.problem);
    };
    const auto sd = solve_pinned(diag);
    REQUIRE(sd.status == sdp::SolveStatus::Optimal);
    CHECK(sd.objective_value == doctest::Approx(3.0).epsilon(1e-5));

    for (int trial = 0; trial < 5; ++trial) {
        // a small ridge keeps the pinned point off the boundary of the PSD cone
        const CVector v = random_complex(rng, 4, 1).col(0);
        const HermitianMatrix q(CMatrix(v * v.adjoint() + 0.05 * CMatrix::Identity(4, 4)));
        double exact = 0.0;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                double mx = 0.0;
                for (int i = 0; i < 2; ++i) {
                    for (int j = 0; j < 2; ++j) mx = std::max(mx, std::abs(q(static_cast<std::size_t>(2 * a + i), static_cast<std::size_t>(2 * b + j))));
                }
                exact += mx;
            }
        }
        CHECK(linf_objective_value(inst, {q}) == doctest::Approx(exact).epsilon(1e-12));
        const auto s = solve_pinned(q);
        REQUIRE(s.status == sdp::SolveStatus::Optimal);
        CHECK(s.objective_value >= exact * (1.0 - 1e-6));
        CHECK(s.objective_value <= exact * 1.01);
    }
}
