// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "rgsbf/stage2.hpp"
#include "support.hpp"

using namespace rgsbf;
using testsupport::small_instance;

namespace {

sdp::FeasibilityVerdict verdict(bool ok) {
    sdp::FeasibilityVerdict v;
    v.verdict = ok ? sdp::Verdict::Feasible : sdp::Verdict::Infeasible;
    v.slack = ok ? 0.0 : 1.0;
    v.solver_status = sdp::SolveStatus::Optimal;
    return v;
}

LiftedSolution random_lifted(std::mt19937_64& rng, const NetworkInstance& inst, double scale = 1.0) {
    LiftedSolution q;
    for (int m = 0; m < inst.M; ++m) q.q.emplace_back(CMatrix(scale * testsupport::random_psd(rng, inst.N, 2)));
    q.lambda.assign(static_cast<std::size_t>(inst.K), 0.0);
    return q;
}

}  // namespace

TEST_CASE("check bound values") {
    CHECK(max_feasibility_checks(1) == 2);
    CHECK(max_feasibility_checks(3) == 3);
    CHECK(max_feasibility_checks(5) == 4);
    CHECK(max_feasibility_checks(7) == 4);
    CHECK(max_feasibility_checks(8) == 5);
}

TEST_CASE("all switch-off counts feasible gives J0 = L") {
    for (int L = 1; L <= 12; ++L) {
        const auto r = binary_search_j0(L, [](int) { return verdict(true); });
        CHECK(r.feasible);
        CHECK(r.j0 == L);
        CHECK(r.checks <= max_feasibility_checks(L));
        CHECK_FALSE(r.monotonicity_violation);
    }
}

TEST_CASE("feasible up to two switched off with five RRHs") {
    const auto r = binary_search_j0(5, [](int i) { return verdict(i <= 2); });
    CHECK(r.j0 == 2);
    CHECK(r.checks <= 4);
    CHECK_FALSE(r.monotonicity_violation);
}

TEST_CASE("bisection finds the threshold of any monotone oracle within the bound") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 500; ++rep) {
        const int L = std::uniform_int_distribution<int>(1, 20)(rng);
        const int t = std::uniform_int_distribution<int>(0, L)(rng);
        std::set<int> asked;
        const auto r = binary_search_j0(L, [&](int i) {
            CHECK(i >= 0);
            CHECK(i <= L);
            asked.insert(i);
            return verdict(i <= t);
        });
        CHECK(r.feasible);
        CHECK(r.j0 == t);
        CHECK(r.checks <= max_feasibility_checks(L));
        CHECK(static_cast<int>(r.transcript.size()) == r.checks);
        CHECK_FALSE(r.monotonicity_violation);
    }
}

TEST_CASE("non-monotone oracle is flagged and resolved to a feasible endpoint") {
    const auto r = binary_search_j0(5, [](int i) { return verdict(i == 0 || i == 1 || i == 3); });
    CHECK(r.feasible);
    CHECK(r.j0 == 3);
    CHECK(r.monotonicity_violation);
    CHECK(r.checks <= max_feasibility_checks(5));
    bool j0_feasible = false;
    for (const auto& s : r.transcript)
        if (s.switched_off == r.j0) j0_feasible = s.verdict == sdp::Verdict::Feasible;
    CHECK(j0_feasible);
}

TEST_CASE("marginal verdicts count as infeasible") {
    const auto r = binary_search_j0(4, [](int i) {
        sdp::FeasibilityVerdict v = verdict(i <= 1);
        if (i == 2) v.verdict = sdp::Verdict::Marginal;
        return v;
    });
    CHECK(r.j0 == 1);
}

TEST_CASE("infeasible with every RRH on") {
    int calls = 0;
    const auto r = binary_search_j0(6, [&](int) {
        ++calls;
        return verdict(false);
    });
    CHECK_FALSE(r.feasible);
    CHECK(calls == 1);
}

TEST_CASE("zero solution gives identity order") {
    std::mt19937_64 rng(12);
    const auto inst = small_instance(rng, {2, 2, 2, 2, 2}, {2, 2}, 0.01, 0.0);
    LiftedSolution q;
    for (int m = 0; m < inst.M; ++m) q.q.emplace_back(static_cast<std::size_t>(inst.N));
    const auto o = compute_ordering(inst, q);
    for (int l = 0; l < inst.L; ++l) {
        CHECK(o.theta[static_cast<std::size_t>(l)] == 0.0);
        CHECK(o.order[static_cast<std::size_t>(l)] == l);
    }
}

TEST_CASE("doubled block trace goes later in the order") {
    std::mt19937_64 rng(13);
    auto inst = small_instance(rng, {1, 1}, {1}, 0.01, 0.0);
    inst.h_hat[0] = CVector::Constant(2, cplx(0.6, 0.8));
    RVector d(2);
    d << 2.0, 1.0;
    LiftedSolution q;
    q.q.push_back(HermitianMatrix::diagonal(d));
    auto o = compute_ordering(inst, q);
    CHECK(o.order == std::vector<int>{1, 0});
    d << 1.0, 2.0;
    q.q[0] = HermitianMatrix::diagonal(d);
    o = compute_ordering(inst, q);
    CHECK(o.order == std::vector<int>{0, 1});
}

TEST_CASE("ordering scores match a direct recomputation") {
    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 20; ++rep) {
        auto inst = small_instance(rng, {2, 1, 3, 2}, {2, 1}, 0.01, 0.0);
        inst.p_fronthaul = {5.6, 6.6, 7.6, 8.6};
        inst.eta = {0.25, 0.3, 0.2, 0.5};
        const auto q = random_lifted(rng, inst);
        const auto o = compute_ordering(inst, q);
        int row = 0;
        for (int l = 0; l < inst.L; ++l) {
            double kappa = 0.0, trace = 0.0;
            for (int a = 0; a < inst.antennas[static_cast<std::size_t>(l)]; ++a, ++row) {
                for (int k = 0; k < inst.K; ++k) kappa += std::norm(inst.h_hat[static_cast<std::size_t>(k)](row));
                for (int m = 0; m < inst.M; ++m) trace += q.q[static_cast<std::size_t>(m)](static_cast<std::size_t>(row), static_cast<std::size_t>(row)).real();
            }
            const auto ll = static_cast<std::size_t>(l);
            const double theta = std::sqrt(kappa * inst.eta[ll] / inst.p_fronthaul[ll]) * std::sqrt(trace);
            CHECK(std::abs(o.kappa[ll] - kappa) <= 1e-12 * (1.0 + kappa));
            CHECK(std::abs(o.theta[ll] - theta) <= 1e-12 * (1.0 + theta));
        }
        for (int i = 1; i < inst.L; ++i) {
            const auto a = static_cast<std::size_t>(o.order[static_cast<std::size_t>(i - 1)]);
            const auto b = static_cast<std::size_t>(o.order[static_cast<std::size_t>(i)]);
            CHECK((o.theta[a] < o.theta[b] || (o.theta[a] == o.theta[b] && a < b)));
        }
    }
}

TEST_CASE("ordering is scale covariant") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(0.01, 100.0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto inst = small_instance(rng, {2, 2, 2, 2, 2}, {2, 2}, 0.01, 0.0);
        const auto q = random_lifted(rng, inst);
        const double c = u(rng);
        LiftedSolution scaled = q;
        for (auto& m : scaled.q) m *= c;
        const auto a = compute_ordering(inst, q);
        const auto b = compute_ordering(inst, scaled);
        CHECK(a.order == b.order);
        for (std::size_t l = 0; l < a.theta.size(); ++l) CHECK(b.theta[l] == doctest::Approx(std::sqrt(c) * a.theta[l]).epsilon(1e-12));
    }
}

TEST_CASE("active mask switches off the ordering prefix") {
    const std::vector<int> order{3, 0, 4, 1, 2};
    for (int j = 0; j <= 5; ++j) {
        const auto mask = active_mask(5, order, j);
        for (int i = 0; i < 5; ++i) CHECK(mask[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] == (i >= j));
    }
}

TEST_CASE("phaselift checks at the extremes") {
    std::mt19937_64 rng(16);
    const auto inst = small_instance(rng, {2, 2, 2}, {2, 1}, 0.01, 0.0);
    const std::vector<bool> all(3, true), none(3, false);
    CHECK(phaselift_feasible(inst, all).verdict == sdp::Verdict::Feasible);
    CHECK(phaselift_feasible(inst, all, ZeroHandling::TraceEquality).verdict == sdp::Verdict::Feasible);
    CHECK(phaselift_feasible(inst, none).verdict == sdp::Verdict::Infeasible);
    CHECK(phaselift_feasible(inst, none, ZeroHandling::TraceEquality).verdict == sdp::Verdict::Infeasible);
}

TEST_CASE("elimination and trace equality agree on partial masks") {
    std::mt19937_64 rng(17);
    int agree = 0, total = 0;
    for (int rep = 0; rep < 4; ++rep) {
        const auto inst = small_instance(rng, {2, 2, 2}, {1, 1}, 0.01, 4.0);
        for (int mask = 1; mask < 8; ++mask) {
            std::vector<bool> a{bool(mask & 1), bool(mask & 2), bool(mask & 4)};
            const auto e = phaselift_feasible(inst, a).verdict;
            const auto t = phaselift_feasible(inst, a, ZeroHandling::TraceEquality).verdict;
            if (e == sdp::Verdict::Marginal || t == sdp::Verdict::Marginal) continue;
            ++total;
            agree += e == t;
        }
    }
    CHECK(total >= 20);
    CHECK(agree == total);
}

TEST_CASE("selection on an instance respects the check bound") {
    std::mt19937_64 rng(18);
    const auto inst = small_instance(rng, {2, 2, 2, 2, 2}, {2, 2}, 0.01, 0.0);
    auto o = ordering_from_scores({0.5, 0.1, 0.4, 0.3, 0.2});
    CHECK(o.order == std::vector<int>{1, 4, 3, 2, 0});
    const auto r = select_active_set(inst, o);
    CHECK(r.feasible);
    CHECK(o.j0 == r.j0);
    CHECK(r.j0 < inst.L);
    CHECK(r.checks <= max_feasibility_checks(inst.L));
    std::ostringstream csv;
    write_transcript_csv(csv, r);
    CHECK(csv.str().rfind("switched_off,verdict,slack,probe\n", 0) == 0);
}
