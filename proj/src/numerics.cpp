#include "risopt/numerics.hpp"

#include <cmath>
#include <sstream>

#include "risopt/errors.hpp"

namespace risopt::numerics {

namespace {

constexpr double kHermitianTolerance = 1e-10;
constexpr double kPositiveDefiniteRelative = 1e-12;

}  // namespace

bool all_finite(const CMatrix& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) {
                return false;
            }
        }
    }
    return true;
}

void require_square_finite(const CMatrix& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        std::ostringstream os;
        os << what << ": expected a non-empty square matrix, got " << a.rows() << "x" << a.cols();
        throw DimensionError(os.str());
    }
    if (!all_finite(a)) {
        throw DomainError(std::string(what) + ": matrix has non-finite entries");
    }
}

double hermitian_defect(const CMatrix& a) {
    return (a - a.adjoint()).norm();
}

HermitianEig hermitian_eig(const CMatrix& a) {
    require_square_finite(a, "hermitian_eig");
    const CMatrix sym = (a + a.adjoint()) * 0.5;

    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw DomainError("hermitian_eig: eigen solver did not converge");
    }

    // Eigen returns ascending order; flip to descending.
    HermitianEig out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

HermitianEig psd_eig(const CMatrix& a) {
    HermitianEig eig = hermitian_eig(a);
    const double lmax = eig.eigenvalues.size() > 0 ? eig.eigenvalues(0) : 0.0;
    const double floor = lmax > 0.0 ? kPsdClampRelative * lmax : 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
        if (eig.eigenvalues(i) < floor) {
            eig.eigenvalues(i) = 0.0;
        }
    }
    return eig;
}

CVector solve_hermitian(const CMatrix& a, const CVector& b) {
    require_square_finite(a, "solve_hermitian");
    if (b.size() != a.rows()) {
        std::ostringstream os;
        os << "solve_hermitian: rhs length " << b.size() << " does not match " << a.rows();
        throw DimensionError(os.str());
    }
    const double scale = a.norm();
    const double smallest = hermitian_eig(a).eigenvalues.minCoeff();
    if (!(smallest > kPositiveDefiniteRelative * scale)) {
        std::ostringstream os;
        os << "solve_hermitian: matrix is not positive definite (smallest eigenvalue "
           << smallest << ", norm " << scale << ")";
        throw SingularityError(os.str(), smallest);
    }
    const CMatrix sym = (a + a.adjoint()) * 0.5;
    Eigen::LLT<CMatrix> llt(sym);
    if (llt.info() != Eigen::Success) {
        throw SingularityError("solve_hermitian: Cholesky factorization failed", smallest);
    }
    return llt.solve(b);
}

double logdet2_plus_identity(const CMatrix& a) {
    require_square_finite(a, "logdet2_plus_identity");
    if (hermitian_defect(a) > kHermitianTolerance * a.norm()) {
        throw DomainError("logdet2_plus_identity: matrix is not Hermitian");
    }
    const HermitianEig eig = psd_eig(a);
    double bits = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
        bits += std::log1p(eig.eigenvalues(i));
    }
    return bits / std::log(2.0);
}

}  // namespace risopt::numerics
