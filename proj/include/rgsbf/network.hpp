// SPDX-License-Identifier: Apache-2.0
//
// Network instances (RRHs, multicast groups, estimated channels, uncertainty
// ellipsoids, power model) and the network power bookkeeping.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgsbf/hermitian.hpp"

namespace rgsbf {

struct ScenarioSpec {
    std::string name = "scenario";
    int rrh_count = 5;
    std::vector<int> antennas_per_rrh{2};     // one entry (broadcast) or rrh_count entries
    std::vector<int> group_sizes{2, 2};
    double error_radius = 0.01;               // epsilon_k, Theta_k = eps^-2 I
    std::vector<double> sinr_db_list{0, 2, 4, 6, 8};
    std::vector<double> fronthaul_power_watts{5.6};  // one entry (broadcast) or rrh_count entries
    double eta = 0.25;
    double p_max_watts = 10.0;
    double noise_power = 1.0;
    int trials = 50;
    std::uint64_t seed = 1;
    std::vector<std::string> methods{"proposed", "linf", "coordinated", "exhaustive"};

    int antennas(int l) const;
    double fronthaul(int l) const;
    /// Throws ModelError on empty groups, nonpositive radius, bad power model.
    void validate() const;
};

/// Reads a YAML scenario file. Throws ConfigError.
ScenarioSpec load_scenario(const std::string& path);

/// Paper scenario presets.
ScenarioSpec scenario_one();
ScenarioSpec scenario_two();
ScenarioSpec convergence_setting();

double db_to_linear(double db);

struct NetworkInstance {
    int L = 0;
    int N = 0;
    int K = 0;
    int M = 0;
    std::vector<int> antennas;  // N_l
    std::vector<int> offsets;   // first antenna row of RRH l
    std::vector<std::vector<int>> groups;
    std::vector<int> group_of;  // MU -> group
    std::vector<CVector> h_hat;
    std::vector<HermitianMatrix> theta;
    std::vector<double> sigma2;
    std::vector<double> gamma;
    std::vector<double> p_max;
    std::vector<double> p_fronthaul;
    std::vector<double> eta;

    /// Structural and physical checks; singular Theta_k is rejected.
    void validate() const;
    /// Channel coefficients of MU k on the antennas of RRH l.
    CVector channel_block(int k, int l) const { return h_hat[static_cast<std::size_t>(k)].segment(offsets[static_cast<std::size_t>(l)], antennas[static_cast<std::size_t>(l)]); }
};

/// Builds an instance: h_hat entries CN(0,1), Theta_k = eps^-2 I, gamma_k from sinr_db.
/// Channels depend only on (spec, seed), so every SINR point of a trial sees the same draw.
NetworkInstance generate_instance(const ScenarioSpec& spec, std::uint64_t seed, double sinr_db);

struct BeamformingSolution {
    std::vector<std::vector<CVector>> v;  // v[l][m], length N_l
    std::vector<bool> active;
    double network_power = 0.0;
    std::vector<double> margins;  // worst-case QoS slack per MU

    static BeamformingSolution zeros(const NetworkInstance& inst);
    /// Aggregate beamformer v_m over all antennas.
    CVector group_beam(int m) const;
    double rrh_power(int l) const;
    int active_count() const;
    double min_margin() const;
};

double transmit_power(const NetworkInstance& inst, const BeamformingSolution& sol);
double fronthaul_power(const NetworkInstance& inst, const std::vector<bool>& active);
/// sum_{l active} P_l^c + sum_{l active} sum_m ||v_lm||^2 / eta_l
double network_power(const NetworkInstance& inst, const BeamformingSolution& sol);

}  // namespace rgsbf
