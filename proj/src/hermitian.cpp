// SPDX-License-Identifier: Apache-2.0

#include "rgsbf/hermitian.hpp"

#include <algorithm>
#include <cmath>

#include "rgsbf/errors.hpp"

namespace rgsbf {

HermitianMatrix::HermitianMatrix(std::size_t dim) : dim_(dim), upper_(dim * (dim + 1) / 2, cplx(0.0, 0.0)) {}

HermitianMatrix::HermitianMatrix(const CMatrix& dense) : HermitianMatrix(static_cast<std::size_t>(dense.rows())) {
    if (dense.rows() != dense.cols()) {
        throw ModelError("HermitianMatrix: input is not square");
    }
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i; j < dim_; ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            set(i, j, 0.5 * (dense(ii, jj) + std::conj(dense(jj, ii))));
        }
    }
}

HermitianMatrix HermitianMatrix::identity(std::size_t dim) {
    HermitianMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
}

HermitianMatrix HermitianMatrix::diagonal(const RVector& d) {
    HermitianMatrix m(static_cast<std::size_t>(d.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i) m.set(static_cast<std::size_t>(i), static_cast<std::size_t>(i), d(i));
    return m;
}

HermitianMatrix HermitianMatrix::outer(const CVector& v) {
    HermitianMatrix m(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        for (Eigen::Index j = i; j < v.size(); ++j) {
            m.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), v(i) * std::conj(v(j)));
        }
    }
    return m;
}

std::size_t HermitianMatrix::index(std::size_t i, std::size_t j) const {
    // row i of the packed upper triangle starts after i rows of lengths dim, dim-1, ...
    return i * dim_ - i * (i - 1) / 2 + (j - i);
}

cplx HermitianMatrix::operator()(std::size_t i, std::size_t j) const {
    if (i <= j) return upper_[index(i, j)];
    return std::conj(upper_[index(j, i)]);
}

void HermitianMatrix::set(std::size_t i, std::size_t j, cplx value) {
    if (i == j) {
        upper_[index(i, i)] = cplx(value.real(), 0.0);
    } else if (i < j) {
        upper_[index(i, j)] = value;
    } else {
        upper_[index(j, i)] = std::conj(value);
    }
}

CMatrix HermitianMatrix::dense() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    CMatrix out(n, n);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i; j < dim_; ++j) {
            const cplx v = upper_[index(i, j)];
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(v);
        }
    }
    return out;
}

double HermitianMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += upper_[index(i, i)].real();
    return t;
}

double HermitianMatrix::frobenius_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i; j < dim_; ++j) {
            const double a = std::norm(upper_[index(i, j)]);
            s += (i == j) ? a : 2.0 * a;
        }
    }
    return std::sqrt(s);
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& other) {
    if (other.dim_ != dim_) throw ModelError("HermitianMatrix: dimension mismatch in +=");
    for (std::size_t i = 0; i < upper_.size(); ++i) upper_[i] += other.upper_[i];
    return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& other) {
    if (other.dim_ != dim_) throw ModelError("HermitianMatrix: dimension mismatch in -=");
    for (std::size_t i = 0; i < upper_.size(); ++i) upper_[i] -= other.upper_[i];
    return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double alpha) {
    for (auto& v : upper_) v *= alpha;
    return *this;
}

RealSymmetricMatrix::RealSymmetricMatrix(std::size_t dim) : dim_(dim), upper_(dim * (dim + 1) / 2, 0.0) {}

RealSymmetricMatrix::RealSymmetricMatrix(const RMatrix& dense)
    : RealSymmetricMatrix(static_cast<std::size_t>(dense.rows())) {
    if (dense.rows() != dense.cols()) throw ModelError("RealSymmetricMatrix: input is not square");
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i; j < dim_; ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            set(i, j, 0.5 * (dense(ii, jj) + dense(jj, ii)));
        }
    }
}

std::size_t RealSymmetricMatrix::index(std::size_t i, std::size_t j) const {
    return i * dim_ - i * (i - 1) / 2 + (j - i);
}

double RealSymmetricMatrix::operator()(std::size_t i, std::size_t j) const {
    return i <= j ? upper_[index(i, j)] : upper_[index(j, i)];
}

void RealSymmetricMatrix::set(std::size_t i, std::size_t j, double value) {
    if (i <= j) {
        upper_[index(i, j)] = value;
    } else {
        upper_[index(j, i)] = value;
    }
}

RMatrix RealSymmetricMatrix::dense() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    RMatrix out(n, n);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i; j < dim_; ++j) {
            const double v = upper_[index(i, j)];
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return out;
}

double RealSymmetricMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += upper_[index(i, i)];
    return t;
}

HermitianEigen eigen_decompose(const CMatrix& hermitian_dense) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_dense);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Hermitian eigendecomposition did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianEigen eigen_decompose(const HermitianMatrix& a) { return eigen_decompose(a.dense()); }

RealSymmetricMatrix embed(const HermitianMatrix& a) {
    const std::size_t n = a.dim();
    RealSymmetricMatrix out(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const cplx v = a(i, j);
            out.set(i, j, v.real());
            out.set(n + i, n + j, v.real());
            // lower-left block is Y, upper-right is -Y
            out.set(n + i, j, v.imag());
            out.set(n + j, i, -v.imag());
        }
    }
    return out;
}

HermitianMatrix project_psd(const HermitianMatrix& a) {
    const auto eig = eigen_decompose(a);
    const RVector clipped = eig.values.cwiseMax(0.0);
    const CMatrix rebuilt = eig.vectors * clipped.asDiagonal() * eig.vectors.adjoint();
    return HermitianMatrix(rebuilt);
}

double min_eigenvalue(const HermitianMatrix& a) {
    if (a.dim() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigenvalue computation failed");
    return solver.eigenvalues()(0);
}

double max_eigenvalue(const HermitianMatrix& a) {
    if (a.dim() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigenvalue computation failed");
    return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

double inner(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) throw ModelError("inner: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        s += a(i, i).real() * b(i, i).real();
        for (std::size_t j = i + 1; j < a.dim(); ++j) {
            // Tr(AB) picks A_ij B_ji + A_ji B_ij = 2 Re(A_ij conj(B_ij))
            s += 2.0 * (a(i, j) * std::conj(b(i, j))).real();
        }
    }
    return s;
}

CMatrix sqrtm_pd(const HermitianMatrix& a) {
    const auto eig = eigen_decompose(a);
    if (eig.values(0) <= 0.0) throw NumericalError("sqrtm_pd: matrix is not positive definite");
    return eig.vectors * eig.values.cwiseSqrt().asDiagonal() * eig.vectors.adjoint();
}

CMatrix inv_sqrtm_pd(const HermitianMatrix& a) {
    const auto eig = eigen_decompose(a);
    if (eig.values(0) <= 0.0) throw NumericalError("inv_sqrtm_pd: matrix is not positive definite");
    return eig.vectors * eig.values.cwiseSqrt().cwiseInverse().asDiagonal() * eig.vectors.adjoint();
}

}  // namespace rgsbf
