#pragma once

#include "risopt/channel.hpp"
#include "risopt/numerics.hpp"

namespace risopt {

/// Eigen-structure of a weighted channel covariance H Rx H^H.
struct Spectrum {
    RVector lambda;  // descending, clamped >= 0
    CMatrix basis;   // column k pairs with lambda(k)
    double l1 = 0.0; // sum of lambda, equals the trace for PSD input

    static Spectrum of(const CMatrix& psd);
};

struct EffRankGradient {
    RVector d_theta;
};

struct EffRankEvaluation {
    double value = 0.0;
    EffRankGradient gradient;
};

namespace effrank {

// Eigenvalues below this fraction of lambda_max carry no entropy weight.
inline constexpr double kZeroEigenRelative = 1e-14;

double effective_rank(const Spectrum& spectrum);

/// exp of the Shannon entropy (natural log) of the normalized eigenvalues of
/// a Hermitian PSD matrix. Throws DegenerateInputError when trace(A) <= 1e-300.
double effective_rank(const CMatrix& a);

/// dE/dlambda_k for every eigenvalue, in the spectrum's (descending) order.
RVector eigen_gradient(const Spectrum& spectrum);

/// H Rx H^H, symmetrized.
CMatrix weighted_covariance(const CMatrix& h, const CMatrix& rx);

/// Effective rank of H(theta) Rx H(theta)^H.
double objective(const ChannelRealization& ch, const RisPhases& phases, const CMatrix& rx);

/// Analytic gradient of the objective with respect to each RIS phase, chaining
/// dE/dlambda_k with first-order eigenvalue perturbation
/// dlambda_k/dtheta_n = 2 Re{u_k^H (dH/dtheta_n) Rx H^H u_k}.
EffRankGradient phase_gradient(const ChannelRealization& ch, const RisPhases& phases, const CMatrix& rx);

/// Objective value and analytic gradient from a single decomposition.
EffRankEvaluation evaluate(const ChannelRealization& ch, const RisPhases& phases, const CMatrix& rx);

/// Central differences of objective(); eps must lie in [1e-8, 1e-3].
EffRankGradient finite_difference_gradient(const ChannelRealization& ch, const RisPhases& phases,
                                           const CMatrix& rx, double eps = 1e-5);

}  // namespace effrank
}  // namespace risopt
