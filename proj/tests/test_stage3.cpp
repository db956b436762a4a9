// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rgsbf/stage3.hpp"
#include "rgsbf/validate.hpp"
#include "support.hpp"

using namespace rgsbf;
using testsupport::random_complex;
using testsupport::random_hermitian;
using testsupport::small_instance;

namespace {

CVector random_vector(std::mt19937_64& rng, int n, double scale = std::sqrt(0.5)) {
    return random_complex(rng, n, 1, scale).col(0);
}

HermitianMatrix spherical(int n, double eps) { return HermitianMatrix::diagonal(RVector::Constant(n, 1.0 / (eps * eps))); }

// Phase-I verdict of: exists lambda >= 0 with [[G, G h],[h^H G, h^H G h - c]] + lambda [[Theta, 0],[0, -1]] >= 0.
sdp::Verdict s_lemma_verdict(const CVector& h, const HermitianMatrix& theta, const CMatrix& g, double c) {
    const auto n = static_cast<int>(h.size());
    CMatrix f0 = CMatrix::Zero(n + 1, n + 1);
    f0.topLeftCorner(n, n) = g;
    f0.topRightCorner(n, 1) = g * h;
    f0.bottomLeftCorner(1, n) = (g * h).adjoint();
    f0(n, n) = (h.adjoint() * g * h)(0, 0).real() - c;
    CMatrix f1 = CMatrix::Zero(n + 1, n + 1);
    f1.topLeftCorner(n, n) = theta.dense();
    f1(n, n) = -1.0;
    sdp::SdpProblem p;
    const auto lambda = p.add_scalar_variable("lambda");
    sdp::LmiConstraint lmi;
    lmi.constant = HermitianMatrix(f0);
    lmi.scalars.push_back({lambda, HermitianMatrix(f1)});
    p.add_lmi(lmi);
    return sdp::check_feasible(p).verdict;
}

BeamformingSolution beams_from(const NetworkInstance& inst, const std::vector<CVector>& group_beams) {
    BeamformingSolution s = BeamformingSolution::zeros(inst);
    for (int l = 0; l < inst.L; ++l)
        for (int m = 0; m < inst.M; ++m)
            s.v[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)] =
                group_beams[static_cast<std::size_t>(m)].segment(inst.offsets[static_cast<std::size_t>(l)], inst.antennas[static_cast<std::size_t>(l)]);
    return s;
}

}  // namespace

TEST_CASE("worst-case margin with identity G and a spherical ball") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 1 + rep % 5;
        const double eps = 0.05 + 0.3 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        CVector h = random_vector(rng, n);
        if (h.norm() < eps) h *= 2.0 * eps / h.norm();
        const double gs2 = 0.3;
        const double expected = std::pow(h.norm() - eps, 2) - gs2;
        CHECK(std::abs(worst_case_margin(h, spherical(n, eps), CMatrix::Identity(n, n), gs2) - expected) <= 1e-9 * (1.0 + std::abs(expected)));
    }
}

TEST_CASE("worst-case margin tends to the nominal slack as the ball shrinks") {
    std::mt19937_64 rng(22);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + rep % 4;
        const CVector h = random_vector(rng, n);
        const CMatrix g = random_hermitian(rng, n);
        const double nominal = (h.adjoint() * g * h)(0, 0).real() - 0.5;
        const double m = worst_case_margin(h, spherical(n, 1e-8), g, 0.5);
        CHECK(m <= nominal + 1e-12);
        CHECK(std::abs(m - nominal) <= 1e-6 * (1.0 + std::abs(nominal)));
    }
}

TEST_CASE("worst-case margin agrees with a sampling oracle") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 6; ++rep) {
        const int n = 3;
        const CVector h = random_vector(rng, n);
        const CVector v1 = random_vector(rng, n), v2 = random_vector(rng, n);
        const CMatrix g = v1 * v1.adjoint() - 0.5 * v2 * v2.adjoint();
        RVector d(n);
        for (int i = 0; i < n; ++i) d(i) = std::pow(0.1 + 0.2 * i, -2);
        const HermitianMatrix theta = HermitianMatrix::diagonal(d);
        const double exact = worst_case_margin(h, theta, g, 0.2);
        const double sampled = sampled_margin(h, theta, g, 0.2, 100000, rng);
        CHECK(exact <= sampled + 1e-9);
        CHECK(sampled - exact <= 1e-4);
    }
}

TEST_CASE("worst-case margin sign matches the S-lemma certificate") {
    std::mt19937_64 rng(24);
    int compared = 0;
    for (int rep = 0; compared < 100 && rep < 400; ++rep) {
        const int n = 2 + rep % 3;
        const CVector h = random_vector(rng, n);
        const CVector v1 = random_vector(rng, n), v2 = random_vector(rng, n);
        const CMatrix g = v1 * v1.adjoint() - 0.3 * v2 * v2.adjoint();
        const HermitianMatrix theta = spherical(n, 0.2);
        const double c = std::uniform_real_distribution<double>(0.0, 1.5)(rng);
        const double margin = worst_case_margin(h, theta, g, c);
        if (std::abs(margin) < 0.05) continue;
        const auto v = s_lemma_verdict(h, theta, g, c);
        REQUIRE(v != sdp::Verdict::Marginal);
        CHECK((margin >= 0.0) == (v == sdp::Verdict::Feasible));
        ++compared;
    }
    CHECK(compared == 100);
}

TEST_CASE("extraction recovers an exact rank-one beam up to phase") {
    std::mt19937_64 rng(25);
    const auto inst = small_instance(rng, {2, 1, 2}, {1, 2}, 0.01, 0.0);
    const std::vector<bool> all(3, true);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<CVector> v;
        LiftedSolution q;
        for (int m = 0; m < inst.M; ++m) {
            v.push_back(random_vector(rng, inst.N));
            q.q.push_back(HermitianMatrix::outer(v.back()));
        }
        const auto s = extract_rank_one(inst, all, q);
        REQUIRE(s.has_value());
        for (int m = 0; m < inst.M; ++m) {
            const CVector got = s->group_beam(m);
            Eigen::Index at = 0;
            got.cwiseAbs().maxCoeff(&at);
            CHECK(std::abs(got(at).imag()) <= 1e-12);
            CHECK(got(at).real() >= 0.0);
            const CVector& ref = v[static_cast<std::size_t>(m)];
            const cplx phase = ref(at) / std::abs(ref(at));
            CHECK((got - std::conj(phase) * ref).norm() <= 1e-8);
        }
    }
}

TEST_CASE("extraction rejects the identity") {
    std::mt19937_64 rng(26);
    const auto inst = small_instance(rng, {1, 1}, {1}, 0.01, 0.0);
    LiftedSolution q;
    q.q.push_back(HermitianMatrix::identity(2));
    CHECK_FALSE(extract_rank_one(inst, {true, true}, q).has_value());
}

TEST_CASE("extraction tolerates tiny full-rank noise") {
    std::mt19937_64 rng(27);
    const auto inst = small_instance(rng, {2, 2}, {1}, 0.01, 0.0);
    for (int rep = 0; rep < 20; ++rep) {
        const CVector v = random_vector(rng, inst.N, 1.0);
        const CMatrix q = v * v.adjoint() + 1e-9 * testsupport::random_psd(rng, inst.N, inst.N) / double(inst.N);
        auto [ev, vecs] = testsupport::jacobi_eigen(testsupport::real_embedding(q));
        std::sort(ev.rbegin(), ev.rend());
        // each eigenvalue of the embedding appears twice
        CHECK(ev[2] / ev[0] < 1e-6);
        LiftedSolution l;
        l.q.emplace_back(q);
        CHECK(extract_rank_one(inst, {true, true}, l).has_value());
    }
}

TEST_CASE("zero candidate cannot be rescaled") {
    std::mt19937_64 rng(28);
    const auto inst = small_instance(rng, {2, 2}, {1, 1}, 0.01, 0.0);
    RandomizationConfig cfg;
    cfg.candidate_count = 1;
    const Candidate zero(static_cast<std::size_t>(inst.M), CVector::Zero(inst.N));
    const auto r = best_candidate(inst, {true, true}, {zero}, cfg);
    CHECK(r.status == RecoveryStatus::AllCandidatesInfeasible);
    CHECK(r.candidates_tried == 1);
    CHECK(r.candidates_feasible == 0);
}

TEST_CASE("rescaling a rank-one relaxation attains its objective") {
    std::mt19937_64 rng(29);
    int tight = 0;
    for (int rep = 0; rep < 8; ++rep) {
        const auto inst = small_instance(rng, {2, 2}, {2}, 0.01, 2.0);
        const std::vector<bool> all(2, true);
        const auto sdr = solve_sdr(inst, all);
        REQUIRE(sdr.status == sdp::SolveStatus::Optimal);
        const auto ex = extract_rank_one(inst, all, sdr.lifted, 1e-5);
        if (!ex) continue;
        ++tight;
        RandomizationConfig cfg;
        cfg.candidate_count = 5;
        cfg.include_principal = false;
        cfg.seed = 7;
        const auto r = gaussian_randomize(inst, all, sdr.lifted, cfg);
        REQUIRE(r.status == RecoveryStatus::Randomized);
        CHECK(r.solution.network_power == doctest::Approx(sdr.objective).epsilon(1e-4));
    }
    CHECK(tight >= 4);
}

TEST_CASE("recovered beams are feasible and bounded below by the relaxation") {
    std::mt19937_64 rng(30);
    int extracted = 0;
    for (int rep = 0; rep < 8; ++rep) {
        const auto inst = small_instance(rng, {2, 2, 2}, {2, 2}, 0.05, 4.0);
        const std::vector<bool> active{true, rep % 2 == 0, true};
        const auto sdr = solve_sdr(inst, active);
        REQUIRE(sdr.status == sdp::SolveStatus::Optimal);
        RandomizationConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(rep);
        const auto r = recover_beamformers(inst, active, sdr.lifted, cfg);
        REQUIRE(r.status != RecoveryStatus::AllCandidatesInfeasible);
        const auto& s = r.solution;
        CHECK(satisfies_constraints(inst, s));
        CHECK(s.min_margin() >= -1e-6);
        for (int l = 0; l < inst.L; ++l) {
            CHECK(s.rrh_power(l) <= inst.p_max[static_cast<std::size_t>(l)] + 1e-9);
            if (!active[static_cast<std::size_t>(l)]) CHECK(s.rrh_power(l) == 0.0);
        }
        CHECK(s.network_power >= sdr.objective - 1e-6);
        CHECK(s.network_power == doctest::Approx(network_power(inst, s)).epsilon(1e-12));
        if (r.status == RecoveryStatus::RankOne) {
            ++extracted;
            CHECK(std::abs(s.network_power - sdr.objective) <= 1e-6 * sdr.objective);
        }
    }
    CHECK(extracted >= 1);
}

TEST_CASE("randomization is deterministic for a fixed seed") {
    std::mt19937_64 rng(31);
    const auto inst = small_instance(rng, {2, 2, 2}, {2, 2}, 0.05, 6.0);
    const std::vector<bool> all(3, true);
    const auto sdr = solve_sdr(inst, all);
    REQUIRE(sdr.status == sdp::SolveStatus::Optimal);
    RandomizationConfig cfg;
    cfg.candidate_count = 20;
    cfg.seed = 99;
    const auto a = gaussian_randomize(inst, all, sdr.lifted, cfg);
    const auto b = gaussian_randomize(inst, all, sdr.lifted, cfg);
    CHECK(a.status == b.status);
    CHECK(a.solution.network_power == b.solution.network_power);
    CHECK(a.candidates_tried == 21);
}

TEST_CASE("single-user relaxation matches the aligned-beam benchmark") {
    std::mt19937_64 rng(32);
    int compared = 0;
    for (int rep = 0; rep < 10; ++rep) {
        const auto inst = small_instance(rng, {1, 1}, {1}, 0.1, 3.0);
        const CVector& h = inst.h_hat[0];
        if (h.norm() < 0.5) continue;
        const CVector dir = h / h.norm();
        // bisection on the power of the matched beam until the worst-case margin vanishes
        double lo = 0.0, hi = 1.0;
        while (worst_case_margin(inst, beams_from(inst, {std::sqrt(hi) * dir}), 0) < 0.0) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (worst_case_margin(inst, beams_from(inst, {std::sqrt(mid) * dir}), 0) < 0.0 ? lo : hi) = mid;
        }
        if (hi > inst.p_max[0]) continue;
        const double benchmark = hi / inst.eta[0] + inst.p_fronthaul[0] + inst.p_fronthaul[1];
        const auto sdr = solve_sdr(inst, {true, true});
        REQUIRE(sdr.status == sdp::SolveStatus::Optimal);
        CHECK(std::abs(sdr.objective - benchmark) <= 1e-4);
        ++compared;
    }
    CHECK(compared >= 5);
}

TEST_CASE("relaxation objective reduces to fronthaul power as the target vanishes") {
    std::mt19937_64 rng(33);
    const auto inst = small_instance(rng, {2, 2, 2}, {2, 1}, 0.01, -90.0);
    const std::vector<bool> active{true, false, true};
    const auto sdr = solve_sdr(inst, active);
    REQUIRE(sdr.status == sdp::SolveStatus::Optimal);
    CHECK(std::abs(sdr.objective - 11.2) <= 1e-6);
    CHECK(solve_sdr(inst, {false, false, false}).status == sdp::SolveStatus::Infeasible);
}

TEST_CASE("solution csv lists every coefficient and a summary row") {
    std::mt19937_64 rng(34);
    const auto inst = small_instance(rng, {2, 1}, {1, 1}, 0.01, 0.0);
    auto sol = BeamformingSolution::zeros(inst);
    sol.active = {true, false};
    sol.v[0][1](1) = cplx(0.5, -0.25);
    evaluate_solution(inst, sol);
    std::ostringstream out;
    write_solution_csv(out, inst, sol);
    std::istringstream in(out.str());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 1 + 3 * 2 + 1);
    CHECK(lines[0] == "kind,rrh,group,antenna,re,im,active_mask,network_power,min_margin");
    CHECK(lines[4] == "beam,0,1,1,0.5,-0.25,,,");
    CHECK(lines.back().rfind("summary,,,,,,10,", 0) == 0);
}
