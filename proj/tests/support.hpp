// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the unit tests: random generators and small independent oracles.
#pragma once

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "rgsbf/network.hpp"

namespace testsupport {

using rgsbf::cplx;
using rgsbf::CMatrix;
using rgsbf::CVector;
using rgsbf::RMatrix;
using rgsbf::RVector;

inline CMatrix random_complex(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = cplx(n(rng), n(rng));
    return m;
}

inline CMatrix random_hermitian(std::mt19937_64& rng, int dim, double scale = 1.0) {
    const CMatrix a = random_complex(rng, dim, dim, scale);
    return 0.5 * (a + a.adjoint());
}

inline CMatrix random_psd(std::mt19937_64& rng, int dim, int rank) {
    const CMatrix a = random_complex(rng, dim, rank);
    return a * a.adjoint();
}

// Cyclic Jacobi eigenvalue iteration for real symmetric matrices. Slow but
// shares no code with the Eigen solvers used by the library.
inline std::pair<std::vector<double>, RMatrix> jacobi_eigen(RMatrix a) {
    const int n = static_cast<int>(a.rows());
    RMatrix v = RMatrix::Identity(n, n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    return {ev, v};
}

// [[Re, -Im], [Im, Re]] written out by hand.
inline RMatrix real_embedding(const CMatrix& a) {
    const int n = static_cast<int>(a.rows());
    RMatrix r(2 * n, 2 * n);
    r.topLeftCorner(n, n) = a.real();
    r.bottomRightCorner(n, n) = a.real();
    r.topRightCorner(n, n) = -a.imag();
    r.bottomLeftCorner(n, n) = a.imag();
    return r;
}

// Explicit instance with CN(0,1) channels, spherical uncertainty and uniform power model.
inline rgsbf::NetworkInstance small_instance(std::mt19937_64& rng, const std::vector<int>& antennas,
                                             const std::vector<int>& group_sizes, double eps, double sinr_db,
                                             double p_fronthaul = 5.6, double p_max = 10.0) {
    rgsbf::NetworkInstance inst;
    inst.L = static_cast<int>(antennas.size());
    inst.antennas = antennas;
    for (int a : antennas) {
        inst.offsets.push_back(inst.N);
        inst.N += a;
    }
    inst.M = static_cast<int>(group_sizes.size());
    for (int m = 0; m < inst.M; ++m) {
        std::vector<int> g;
        for (int i = 0; i < group_sizes[static_cast<std::size_t>(m)]; ++i) {
            g.push_back(inst.K++);
            inst.group_of.push_back(m);
        }
        inst.groups.push_back(g);
    }
    for (int k = 0; k < inst.K; ++k) {
        inst.h_hat.push_back(random_complex(rng, inst.N, 1, std::sqrt(0.5)).col(0));
        inst.theta.push_back(rgsbf::HermitianMatrix::diagonal(RVector::Constant(inst.N, 1.0 / (eps * eps))));
        inst.sigma2.push_back(1.0);
        inst.gamma.push_back(std::pow(10.0, sinr_db / 10.0));
    }
    inst.p_max.assign(static_cast<std::size_t>(inst.L), p_max);
    inst.p_fronthaul.assign(static_cast<std::size_t>(inst.L), p_fronthaul);
    inst.eta.assign(static_cast<std::size_t>(inst.L), 0.25);
    inst.validate();
    return inst;
}

}  // namespace testsupport
