// SPDX-License-Identifier: Apache-2.0
//
// Reference methods: all RRHs on, enumeration of active sets, and the
// l1/linf ordering heuristic.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgsbf/pipeline.hpp"

namespace rgsbf {

inline constexpr int kExhaustiveMaxRrhs = 12;

/// Relaxation and recovery with every RRH active.
MethodOutcome coordinated_beamforming(const NetworkInstance& inst, const PipelineConfig& cfg, std::uint64_t seed);

/// Every subset of RRHs, recovered network powers compared. Throws ModelError when L > kExhaustiveMaxRrhs.
MethodOutcome exhaustive_search(const NetworkInstance& inst, const PipelineConfig& cfg, std::uint64_t seed);

struct LinfStageResult {
    sdp::SolveStatus status = sdp::SolveStatus::MaxIterations;
    LiftedSolution lifted;
    double objective = 0.0;
};

/// Single SDP minimizing the l1/linf objective under the robust QoS and power constraints.
LinfStageResult solve_linf_stage(const NetworkInstance& inst, const sdp::SolverConfig& solver = {});

/// max over m and over entries in the rows of RRH l of |Q_m(i, j)|
std::vector<double> linf_scores(const NetworkInstance& inst, const LiftedSolution& q);

MethodOutcome linf_pipeline(const NetworkInstance& inst, const PipelineConfig& cfg, std::uint64_t seed);

enum class Method { Proposed, Linf, Coordinated, Exhaustive };
const char* to_string(Method m);
/// Throws ConfigError on unknown names.
Method parse_method(const std::string& name);

MethodOutcome run_method(const NetworkInstance& inst, Method m, const PipelineConfig& cfg, std::uint64_t seed);

}  // namespace rgsbf
