// SPDX-License-Identifier: Apache-2.0
//
// Complex Hermitian matrices with conjugate symmetry enforced by storage.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace rgsbf {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

class RealSymmetricMatrix;

/// Hermitian matrix stored as its packed upper triangle (row-major).
///
/// Every constructor symmetrizes its input as (A + A^H) / 2, so entry(i,j) is
/// always conj(entry(j,i)) and diagonal entries are real.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(std::size_t dim);
    explicit HermitianMatrix(const CMatrix& dense);

    static HermitianMatrix identity(std::size_t dim);
    static HermitianMatrix diagonal(const RVector& d);
    /// v v^H
    static HermitianMatrix outer(const CVector& v);

    std::size_t dim() const { return dim_; }

    cplx operator()(std::size_t i, std::size_t j) const;
    /// Sets entry (i,j) and, implicitly, (j,i) = conj(value). Diagonal writes drop the imaginary part.
    void set(std::size_t i, std::size_t j, cplx value);

    CMatrix dense() const;
    double trace() const;
    double frobenius_norm() const;

    HermitianMatrix& operator+=(const HermitianMatrix& other);
    HermitianMatrix& operator-=(const HermitianMatrix& other);
    HermitianMatrix& operator*=(double alpha);

    friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
    friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
    friend HermitianMatrix operator*(double alpha, HermitianMatrix a) { return a *= alpha; }

private:
    std::size_t index(std::size_t i, std::size_t j) const;

    std::size_t dim_ = 0;
    std::vector<cplx> upper_;
};

/// Real symmetric matrix stored as its packed upper triangle.
class RealSymmetricMatrix {
public:
    RealSymmetricMatrix() = default;
    explicit RealSymmetricMatrix(std::size_t dim);
    explicit RealSymmetricMatrix(const RMatrix& dense);

    std::size_t dim() const { return dim_; }
    double operator()(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, double value);
    RMatrix dense() const;
    double trace() const;

private:
    std::size_t index(std::size_t i, std::size_t j) const;

    std::size_t dim_ = 0;
    std::vector<double> upper_;
};

struct HermitianEigen {
    RVector values;   // ascending
    CMatrix vectors;  // columns are orthonormal eigenvectors
};

/// Dense Hermitian eigendecomposition. Throws NumericalError on failure.
HermitianEigen eigen_decompose(const HermitianMatrix& a);
HermitianEigen eigen_decompose(const CMatrix& hermitian_dense);

/// Real embedding [[X, -Y], [Y, X]] of A = X + iY.
RealSymmetricMatrix embed(const HermitianMatrix& a);

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
HermitianMatrix project_psd(const HermitianMatrix& a);

double min_eigenvalue(const HermitianMatrix& a);
double max_eigenvalue(const HermitianMatrix& a);

/// Re Tr(A B) for Hermitian A, B.
double inner(const HermitianMatrix& a, const HermitianMatrix& b);

/// Hermitian square root and inverse square root of a positive definite matrix.
CMatrix sqrtm_pd(const HermitianMatrix& a);
CMatrix inv_sqrtm_pd(const HermitianMatrix& a);

}  // namespace rgsbf
