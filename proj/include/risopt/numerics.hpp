#pragma once

#include <complex>

#include <Eigen/Dense>

namespace risopt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Eigendecomposition of a Hermitian matrix. Eigenvalues are sorted in
/// descending order and column k of `eigenvectors` pairs with eigenvalue k.
struct HermitianEig {
    RVector eigenvalues;
    CMatrix eigenvectors;
};

namespace numerics {

// Relative threshold (to the largest eigenvalue) below which eigenvalues of a
// PSD matrix are treated as exact zeros.
inline constexpr double kPsdClampRelative = 1e-12;

bool all_finite(const CMatrix& a);

/// Throws DimensionError for non-square input, DomainError for NaN/Inf.
void require_square_finite(const CMatrix& a, const char* what);

double hermitian_defect(const CMatrix& a);

/// Decomposes (A + A^H)/2. Eigenvalues are returned as computed (may be
/// slightly negative for PSD input); use psd_eig for the clamped variant.
HermitianEig hermitian_eig(const CMatrix& a);

/// hermitian_eig followed by clamping: eigenvalues below
/// kPsdClampRelative * lambda_max (including negative round-off) become 0.
HermitianEig psd_eig(const CMatrix& a);

/// Solves A x = b for Hermitian positive definite A. Throws SingularityError
/// when the smallest eigenvalue is not above 1e-12 * ||A||_F.
CVector solve_hermitian(const CMatrix& a, const CVector& b);

/// log2 det(I + A) in bits for Hermitian PSD A, evaluated as
/// sum_i log2(1 + lambda_i). Throws DomainError when A is not Hermitian
/// within 1e-10 * ||A||_F.
double logdet2_plus_identity(const CMatrix& a);

}  // namespace numerics
}  // namespace risopt
