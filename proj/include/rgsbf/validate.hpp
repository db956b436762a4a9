// SPDX-License-Identifier: Apache-2.0
//
// Self-check suites run by `rgsbf validate`: analytic SDPs, the variational
// identity, sampled robustness of the QoS blocks, the worst-case margin
// against a sampling oracle and the real embedding spectra.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rgsbf/hermitian.hpp"

namespace rgsbf {

enum class ValidationLevel { Quick, Full };

struct ValidationOptions {
    ValidationLevel level = ValidationLevel::Quick;
    std::uint64_t seed = 1;
    /// When positive, the robustness suite accepts QoS blocks down to -injected_tolerance * I.
    double injected_tolerance = 0.0;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

std::vector<CheckResult> run_validation(const ValidationOptions& opt);

/// Sampling upper bound on min over e^H Theta e <= 1 of (h + e)^H G (h + e): `samples` points on
/// and inside the ellipsoid, then projected gradient descent from the best few.
double sampled_margin(const CVector& h, const HermitianMatrix& theta, const CMatrix& g, double gamma_sigma2,
                      long samples, std::mt19937_64& rng);

}  // namespace rgsbf
