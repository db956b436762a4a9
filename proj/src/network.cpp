// SPDX-License-Identifier: Apache-2.0

#include "rgsbf/network.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <numeric>

#include "rgsbf/errors.hpp"
#include "rgsbf/rng.hpp"

namespace rgsbf {

int ScenarioSpec::antennas(int l) const {
    return antennas_per_rrh.size() == 1 ? antennas_per_rrh[0] : antennas_per_rrh.at(static_cast<std::size_t>(l));
}

double ScenarioSpec::fronthaul(int l) const {
    return fronthaul_power_watts.size() == 1 ? fronthaul_power_watts[0]
                                             : fronthaul_power_watts.at(static_cast<std::size_t>(l));
}

void ScenarioSpec::validate() const {
    if (rrh_count < 1) throw ModelError("scenario: rrh_count must be positive");
    if (antennas_per_rrh.size() != 1 && static_cast<int>(antennas_per_rrh.size()) != rrh_count)
        throw ModelError("scenario: antennas_per_rrh needs 1 or rrh_count entries");
    for (int n : antennas_per_rrh)
        if (n < 1) throw ModelError("scenario: every RRH needs at least one antenna");
    if (group_sizes.empty()) throw ModelError("scenario: no multicast groups");
    for (int g : group_sizes)
        if (g < 1) throw ModelError("scenario: empty multicast group");
    if (!(error_radius > 0.0)) throw ModelError("scenario: error_radius must be positive");
    if (fronthaul_power_watts.size() != 1 && static_cast<int>(fronthaul_power_watts.size()) != rrh_count)
        throw ModelError("scenario: fronthaul_power_watts needs 1 or rrh_count entries");
    for (double p : fronthaul_power_watts)
        if (p < 0.0) throw ModelError("scenario: negative fronthaul power");
    if (!(eta > 0.0 && eta <= 1.0)) throw ModelError("scenario: eta must lie in (0, 1]");
    if (!(p_max_watts > 0.0)) throw ModelError("scenario: p_max_watts must be positive");
    if (!(noise_power > 0.0)) throw ModelError("scenario: noise_power must be positive");
    if (trials < 0) throw ModelError("scenario: negative trial count");
}

namespace {

template <typename T>
std::vector<T> scalar_or_list(const YAML::Node& n) {
    if (n.IsSequence()) return n.as<std::vector<T>>();
    return {n.as<T>()};
}

}  // namespace

ScenarioSpec load_scenario(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw ConfigError("cannot read config '" + path + "': " + e.what());
    }
    ScenarioSpec s;
    try {
        if (root["name"]) s.name = root["name"].as<std::string>();
        if (root["rrh_count"]) s.rrh_count = root["rrh_count"].as<int>();
        if (root["antennas_per_rrh"]) s.antennas_per_rrh = scalar_or_list<int>(root["antennas_per_rrh"]);
        if (root["group_sizes"]) s.group_sizes = scalar_or_list<int>(root["group_sizes"]);
        if (root["error_radius"]) s.error_radius = root["error_radius"].as<double>();
        if (root["sinr_db_list"]) s.sinr_db_list = scalar_or_list<double>(root["sinr_db_list"]);
        if (root["fronthaul_power_watts"]) s.fronthaul_power_watts = scalar_or_list<double>(root["fronthaul_power_watts"]);
        if (root["eta"]) s.eta = root["eta"].as<double>();
        if (root["p_max_watts"]) s.p_max_watts = root["p_max_watts"].as<double>();
        if (root["noise_power"]) s.noise_power = root["noise_power"].as<double>();
        if (root["trials"]) s.trials = root["trials"].as<int>();
        if (root["seed"]) s.seed = root["seed"].as<std::uint64_t>();
        if (root["methods"]) s.methods = scalar_or_list<std::string>(root["methods"]);
    } catch (const YAML::Exception& e) {
        throw ConfigError("bad value in config '" + path + "': " + e.what());
    }
    try {
        s.validate();
    } catch (const ModelError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return s;
}

ScenarioSpec scenario_one() {
    ScenarioSpec s;
    s.name = "scenario_one";
    s.rrh_count = 5;
    s.antennas_per_rrh = {2};
    s.group_sizes = {2, 2};
    s.error_radius = 0.01;
    s.fronthaul_power_watts = {5.6};
    return s;
}

ScenarioSpec scenario_two() {
    ScenarioSpec s;
    s.name = "scenario_two";
    s.rrh_count = 8;
    s.antennas_per_rrh = {2};
    s.group_sizes = {2, 2, 2, 2, 2};
    s.error_radius = 0.05;
    s.fronthaul_power_watts.clear();
    for (int l = 0; l < 8; ++l) s.fronthaul_power_watts.push_back(5.6 + l);
    s.methods = {"proposed", "linf", "coordinated"};
    return s;
}

ScenarioSpec convergence_setting() {
    ScenarioSpec s;
    s.name = "convergence";
    s.rrh_count = 10;
    s.antennas_per_rrh = {2};
    s.group_sizes = {2, 2, 2};
    s.error_radius = 0.05;
    s.fronthaul_power_watts = {5.6};
    s.sinr_db_list = {4};
    s.trials = 20;
    s.methods = {"proposed"};
    return s;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void NetworkInstance::validate() const {
    if (L < 1 || K < 1 || M < 1) throw ModelError("instance: empty network");
    if (static_cast<int>(antennas.size()) != L || static_cast<int>(offsets.size()) != L)
        throw ModelError("instance: antenna layout size mismatch");
    if (std::accumulate(antennas.begin(), antennas.end(), 0) != N) throw ModelError("instance: antenna count mismatch");
    if (static_cast<int>(groups.size()) != M || static_cast<int>(group_of.size()) != K)
        throw ModelError("instance: group layout size mismatch");
    std::vector<int> seen(static_cast<std::size_t>(K), 0);
    for (int m = 0; m < M; ++m) {
        if (groups[static_cast<std::size_t>(m)].empty()) throw ModelError("instance: empty multicast group");
        for (int k : groups[static_cast<std::size_t>(m)]) {
            if (k < 0 || k >= K) throw ModelError("instance: group member out of range");
            if (seen[static_cast<std::size_t>(k)]++) throw ModelError("instance: MU in more than one group");
            if (group_of[static_cast<std::size_t>(k)] != m) throw ModelError("instance: group_of disagrees with groups");
        }
    }
    for (int k = 0; k < K; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        if (!seen[kk]) throw ModelError("instance: MU without a group");
        if (h_hat.size() != static_cast<std::size_t>(K) || h_hat[kk].size() != N) throw ModelError("instance: channel size mismatch");
        if (theta.size() != static_cast<std::size_t>(K) || static_cast<int>(theta[kk].dim()) != N)
            throw ModelError("instance: uncertainty shape size mismatch");
        if (min_eigenvalue(theta[kk]) <= 0.0) throw ModelError("instance: uncertainty shape must be positive definite");
        if (!(sigma2.at(kk) > 0.0)) throw ModelError("instance: noise power must be positive");
        if (!(gamma.at(kk) > 0.0)) throw ModelError("instance: SINR target must be positive");
    }
    for (int l = 0; l < L; ++l) {
        const auto ll = static_cast<std::size_t>(l);
        if (!(p_max.at(ll) > 0.0)) throw ModelError("instance: power budget must be positive");
        if (p_fronthaul.at(ll) < 0.0) throw ModelError("instance: negative fronthaul power");
        if (!(eta.at(ll) > 0.0 && eta[ll] <= 1.0)) throw ModelError("instance: eta must lie in (0, 1]");
    }
}

NetworkInstance generate_instance(const ScenarioSpec& spec, std::uint64_t seed, double sinr_db) {
    spec.validate();
    NetworkInstance inst;
    inst.L = spec.rrh_count;
    inst.M = static_cast<int>(spec.group_sizes.size());
    for (int l = 0; l < inst.L; ++l) {
        inst.offsets.push_back(inst.N);
        inst.antennas.push_back(spec.antennas(l));
        inst.N += spec.antennas(l);
        inst.p_max.push_back(spec.p_max_watts);
        inst.p_fronthaul.push_back(spec.fronthaul(l));
        inst.eta.push_back(spec.eta);
    }
    for (int m = 0; m < inst.M; ++m) {
        std::vector<int> members;
        for (int i = 0; i < spec.group_sizes[static_cast<std::size_t>(m)]; ++i) {
            members.push_back(inst.K++);
            inst.group_of.push_back(m);
        }
        inst.groups.push_back(std::move(members));
    }
    auto rng = substream(seed, "channel");
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const double inv_eps2 = 1.0 / (spec.error_radius * spec.error_radius);
    for (int k = 0; k < inst.K; ++k) {
        CVector h(inst.N);
        for (int n = 0; n < inst.N; ++n) {
            const double re = normal(rng);
            const double im = normal(rng);
            h(n) = cplx(re, im);
        }
        inst.h_hat.push_back(h);
        inst.theta.push_back(HermitianMatrix::diagonal(RVector::Constant(inst.N, inv_eps2)));
        inst.sigma2.push_back(spec.noise_power);
        inst.gamma.push_back(db_to_linear(sinr_db));
    }
    return inst;
}

BeamformingSolution BeamformingSolution::zeros(const NetworkInstance& inst) {
    BeamformingSolution s;
    s.v.resize(static_cast<std::size_t>(inst.L));
    for (int l = 0; l < inst.L; ++l) {
        for (int m = 0; m < inst.M; ++m) s.v[static_cast<std::size_t>(l)].push_back(CVector::Zero(inst.antennas[static_cast<std::size_t>(l)]));
    }
    s.active.assign(static_cast<std::size_t>(inst.L), true);
    s.margins.assign(static_cast<std::size_t>(inst.K), 0.0);
    return s;
}

CVector BeamformingSolution::group_beam(int m) const {
    Eigen::Index n = 0;
    for (const auto& row : v) n += row.at(static_cast<std::size_t>(m)).size();
    CVector out(n);
    Eigen::Index off = 0;
    for (const auto& row : v) {
        const auto& b = row[static_cast<std::size_t>(m)];
        out.segment(off, b.size()) = b;
        off += b.size();
    }
    return out;
}

double BeamformingSolution::rrh_power(int l) const {
    double p = 0.0;
    for (const auto& b : v.at(static_cast<std::size_t>(l))) p += b.squaredNorm();
    return p;
}

int BeamformingSolution::active_count() const {
    return static_cast<int>(std::count(active.begin(), active.end(), true));
}

double BeamformingSolution::min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (double x : margins) m = std::min(m, x);
    return m;
}

double transmit_power(const NetworkInstance& inst, const BeamformingSolution& sol) {
    double p = 0.0;
    for (int l = 0; l < inst.L; ++l) p += sol.rrh_power(l);
    return p;
}

double fronthaul_power(const NetworkInstance& inst, const std::vector<bool>& active) {
    double p = 0.0;
    for (int l = 0; l < inst.L; ++l)
        if (active.at(static_cast<std::size_t>(l))) p += inst.p_fronthaul[static_cast<std::size_t>(l)];
    return p;
}

double network_power(const NetworkInstance& inst, const BeamformingSolution& sol) {
    double p = 0.0;
    for (int l = 0; l < inst.L; ++l) {
        const auto ll = static_cast<std::size_t>(l);
        if (!sol.active.at(ll)) continue;
        p += inst.p_fronthaul[ll] + sol.rrh_power(l) / inst.eta[ll];
    }
    return p;
}

}  // namespace rgsbf
