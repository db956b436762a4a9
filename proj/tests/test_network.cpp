// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "rgsbf/errors.hpp"
#include "rgsbf/network.hpp"
#include "support.hpp"

using namespace rgsbf;

TEST_CASE("scenario presets produce the stated dimensions") {
    const auto one = generate_instance(scenario_one(), 1, 0.0);
    CHECK(one.L == 5);
    CHECK(one.N == 10);
    CHECK(one.K == 4);
    CHECK(one.M == 2);
    CHECK(one.p_fronthaul == std::vector<double>(5, 5.6));
    CHECK(one.eta == std::vector<double>(5, 0.25));
    CHECK(one.theta[0](0, 0).real() == doctest::Approx(1e4));

    const auto two = generate_instance(scenario_two(), 1, 0.0);
    CHECK(two.N == 16);
    CHECK(two.K == 10);
    CHECK(two.M == 5);
    for (int l = 0; l < 8; ++l) CHECK(two.p_fronthaul[static_cast<std::size_t>(l)] == doctest::Approx(5.6 + l));
    CHECK(two.theta[3](2, 2).real() == doctest::Approx(400.0));
}

TEST_CASE("instances are a function of the seed only") {
    const auto spec = scenario_one();
    const auto a = generate_instance(spec, 7, 0.0);
    const auto b = generate_instance(spec, 7, 0.0);
    const auto c = generate_instance(spec, 8, 0.0);
    const auto d = generate_instance(spec, 7, 6.0);
    for (int k = 0; k < a.K; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        CHECK((a.h_hat[kk] - b.h_hat[kk]).norm() == 0.0);
        CHECK((a.h_hat[kk] - d.h_hat[kk]).norm() == 0.0);
        CHECK((a.h_hat[kk] - c.h_hat[kk]).norm() > 0.0);
        CHECK(d.gamma[kk] == doctest::Approx(std::pow(10.0, 0.6)));
    }
}

TEST_CASE("channel entries have unit variance") {
    auto spec = scenario_one();
    double sum = 0.0;
    long count = 0;
    for (std::uint64_t s = 0; count < 10000; ++s) {
        const auto inst = generate_instance(spec, s, 0.0);
        for (const auto& h : inst.h_hat) {
            sum += h.squaredNorm();
            count += h.size();
        }
    }
    CHECK(std::abs(sum / static_cast<double>(count) - 1.0) < 0.05);
}

TEST_CASE("network power examples") {
    const auto inst = generate_instance(scenario_one(), 1, 0.0);
    auto sol = BeamformingSolution::zeros(inst);
    CHECK(network_power(inst, sol) == doctest::Approx(28.0));
    sol.active.assign(5, false);
    CHECK(network_power(inst, sol) == 0.0);
    sol.active[2] = true;
    sol.v[2][0] = CVector::Zero(2);
    sol.v[2][0](0) = cplx(0.6, 0.0);
    sol.v[2][1](1) = cplx(0.0, 0.8);
    CHECK(network_power(inst, sol) == doctest::Approx(9.6));
    CHECK(transmit_power(inst, sol) == doctest::Approx(1.0));
}

TEST_CASE("adding an idle RRH adds exactly its fronthaul power") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pick(0, 4);
    const auto inst = generate_instance(scenario_two(), 2, 0.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto sol = BeamformingSolution::zeros(inst);
        sol.active.assign(8, false);
        for (int l = 0; l < 8; ++l) {
            if (pick(rng) < 2) continue;
            sol.active[static_cast<std::size_t>(l)] = true;
            for (auto& v : sol.v[static_cast<std::size_t>(l)]) v = testsupport::random_complex(rng, 2, 1).col(0);
        }
        for (int l = 0; l < 8; ++l) {
            const auto ll = static_cast<std::size_t>(l);
            if (sol.active[ll]) continue;
            auto bigger = sol;
            bigger.active[ll] = true;
            CHECK(network_power(inst, bigger) - network_power(inst, sol) == doctest::Approx(inst.p_fronthaul[ll]));
        }
    }
}

TEST_CASE("instance validation rejects malformed data") {
    std::mt19937_64 rng(5);
    const auto good = testsupport::small_instance(rng, {2, 2}, {1, 1}, 0.1, 0.0);
    auto bad = good;
    bad.groups[1] = {0};
    CHECK_THROWS_AS(bad.validate(), ModelError);
    bad = good;
    bad.theta[0] = HermitianMatrix::diagonal(RVector::Zero(4));
    CHECK_THROWS_AS(bad.validate(), ModelError);
    bad = good;
    bad.eta[1] = 1.5;
    CHECK_THROWS_AS(bad.validate(), ModelError);
    bad = good;
    bad.sigma2[0] = 0.0;
    CHECK_THROWS_AS(bad.validate(), ModelError);
    bad = good;
    bad.h_hat[1] = CVector::Zero(3);
    CHECK_THROWS_AS(bad.validate(), ModelError);
}

TEST_CASE("scenario files load and reject bad input") {
    const auto dir = std::filesystem::temp_directory_path() / "rgsbf_test_network";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "s.yaml").string();
    {
        std::ofstream f(path);
        f << "name: tiny\nrrh_count: 3\nantennas_per_rrh: [1, 2, 3]\ngroup_sizes: 2\nerror_radius: 0.02\n"
             "sinr_db_list: [1, 3]\nfronthaul_power_watts: [1, 2, 3]\ntrials: 4\nseed: 9\nmethods: proposed\n";
    }
    const auto spec = load_scenario(path);
    CHECK(spec.name == "tiny");
    CHECK(spec.antennas(2) == 3);
    CHECK(spec.fronthaul(1) == 2.0);
    CHECK(spec.sinr_db_list == std::vector<double>{1, 3});
    CHECK(spec.methods == std::vector<std::string>{"proposed"});
    const auto inst = generate_instance(spec, spec.seed, 1.0);
    CHECK(inst.N == 6);
    CHECK(inst.K == 2);

    {
        std::ofstream f(path);
        f << "rrh_count: 3\nantennas_per_rrh: [1, 2]\n";
    }
    CHECK_THROWS_AS(load_scenario(path), ConfigError);
    {
        std::ofstream f(path);
        f << "rrh_count: many\n";
    }
    CHECK_THROWS_AS(load_scenario(path), ConfigError);
    CHECK_THROWS_AS(load_scenario((dir / "missing.yaml").string()), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("dB conversion") {
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(db_to_linear(3.0) == doctest::Approx(1.99526231));
}
