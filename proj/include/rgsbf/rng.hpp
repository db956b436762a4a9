// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rgsbf {

/// Independent generator for a (seed, label) pair, so channel draws and
/// randomization candidates never share a stream.
inline std::mt19937_64 substream(std::uint64_t seed, std::string_view label) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace rgsbf
