// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace rgsbf {

/// Eigen/Cholesky backend failure.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ill-formed model data: dimension mismatches, invalid instance parameters.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unreadable or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rgsbf
