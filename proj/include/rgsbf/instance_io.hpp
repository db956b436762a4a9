// SPDX-License-Identifier: Apache-2.0
//
// JSON form of a single instance and of a solution, used by `rgsbf solve`.
//
// Instance keys (scalars broadcast over RRHs or MUs where a list is expected):
//   antennas     [N_1, ..., N_L]
//   groups       [[k, ...], ...]            MU indices per multicast group
//   h_hat        [[[re, im], ...], ...]     one length-N list per MU
//   error_radius eps or [eps_k]             Theta_k = eps_k^-2 I (ignored when theta is given)
//   theta        [[[[re, im], ...], ...]]   optional full N x N shape per MU
//   sinr_db      gamma in dB, scalar or per MU
//   noise_power, p_max, p_fronthaul, eta

#pragma once

#include <string>

#include <json.hpp>

#include "rgsbf/baselines.hpp"

namespace rgsbf {

/// Throws ConfigError on missing or malformed fields, ModelError on inconsistent data.
NetworkInstance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const NetworkInstance& inst);

nlohmann::json outcome_to_json(const NetworkInstance& inst, const MethodOutcome& o, const std::string& method);

}  // namespace rgsbf
