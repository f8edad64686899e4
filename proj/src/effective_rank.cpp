#include "risopt/effective_rank.hpp"

#include <cmath>
#include <sstream>

#include "risopt/errors.hpp"

namespace risopt {

namespace {

constexpr double kDegenerateTrace = 1e-300;

void require_nondegenerate(const Spectrum& s) {
    if (!(s.l1 > kDegenerateTrace)) {
        throw DegenerateInputError("effective rank undefined: eigenvalue sum is zero");
    }
}

double zero_floor(const Spectrum& s) {
    return s.lambda.size() > 0 ? effrank::kZeroEigenRelative * s.lambda(0) : 0.0;
}

}  // namespace

Spectrum Spectrum::of(const CMatrix& psd) {
    HermitianEig eig = numerics::psd_eig(psd);
    Spectrum s;
    s.l1 = eig.eigenvalues.sum();
    s.lambda = std::move(eig.eigenvalues);
    s.basis = std::move(eig.eigenvectors);
    return s;
}

namespace effrank {

double effective_rank(const Spectrum& spectrum) {
    require_nondegenerate(spectrum);
    const double floor = zero_floor(spectrum);
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < spectrum.lambda.size(); ++i) {
        const double li = spectrum.lambda(i);
        if (li <= floor) {
            continue;
        }
        const double p = li / spectrum.l1;
        entropy -= p * std::log(p);
    }
    return std::exp(entropy);
}

double effective_rank(const CMatrix& a) {
    return effective_rank(Spectrum::of(a));
}

RVector eigen_gradient(const Spectrum& spectrum) {
    require_nondegenerate(spectrum);
    const Eigen::Index k_count = spectrum.lambda.size();
    const double l1 = spectrum.l1;
    const double floor = zero_floor(spectrum);
    const double e = effective_rank(spectrum);

    // C(j, k) = sum_{i != k} lambda_i on the diagonal and -lambda_j off it.
    RVector grad = RVector::Zero(k_count);
    for (Eigen::Index k = 0; k < k_count; ++k) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < k_count; ++j) {
            const double lj = spectrum.lambda(j);
            if (lj <= floor) {
                continue;
            }
            const double c = (j == k) ? l1 - spectrum.lambda(k) : -lj;
            acc += -c / (l1 * l1) * (1.0 + std::log(lj / l1));
        }
        grad(k) = acc * e;
    }
    return grad;
}

CMatrix weighted_covariance(const CMatrix& h, const CMatrix& rx) {
    if (rx.rows() != h.cols() || rx.cols() != h.cols()) {
        std::ostringstream os;
        os << "weighted_covariance: Rx is " << rx.rows() << "x" << rx.cols() << " for a channel with "
           << h.cols() << " transmit antennas";
        throw DimensionError(os.str());
    }
    const CMatrix w = h * rx * h.adjoint();
    return (w + w.adjoint()) * 0.5;
}

double objective(const ChannelRealization& ch, const RisPhases& phases, const CMatrix& rx) {
    return effective_rank(weighted_covariance(composite_channel(ch, phases), rx));
}

EffRankEvaluation evaluate(const ChannelRealization& ch, const RisPhases& phases, const CMatrix& rx) {
    const CMatrix h = composite_channel(ch, phases);
    const Spectrum s = Spectrum::of(weighted_covariance(h, rx));

    EffRankEvaluation out;
    out.value = effective_rank(s);
    const RVector de_dlambda = eigen_gradient(s);

    // A(k, n) = u_k^H H2(:, n),  B(n, k) = H1(n, :) Rx H^H u_k
    const CMatrix a = s.basis.adjoint() * ch.h2;
    const CMatrix b = ch.h1 * (rx * (h.adjoint() * s.basis));

    const int n_count = phases.size();
    out.gradient.d_theta = RVector::Zero(n_count);
    for (int n = 0; n < n_count; ++n) {
        const Complex factor = Complex(0.0, 1.0) * std::polar(1.0, phases.theta(n));
        double acc = 0.0;
        for (Eigen::Index k = 0; k < s.lambda.size(); ++k) {
            const double dlambda = 2.0 * (factor * a(k, n) * b(n, k)).real();
            acc += dlambda * de_dlambda(k);
        }
        out.gradient.d_theta(n) = acc;
    }
    return out;
}

EffRankGradient phase_gradient(const ChannelRealization& ch, const RisPhases& phases, const CMatrix& rx) {
    return evaluate(ch, phases, rx).gradient;
}

EffRankGradient finite_difference_gradient(const ChannelRealization& ch, const RisPhases& phases,
                                           const CMatrix& rx, double eps) {
    if (!(eps >= 1e-8 && eps <= 1e-3)) {
        std::ostringstream os;
        os << "finite_difference_gradient: step " << eps << " outside [1e-8, 1e-3]";
        throw ParameterError(os.str());
    }
    EffRankGradient out{RVector::Zero(phases.size())};
    RisPhases probe = phases;
    for (int n = 0; n < phases.size(); ++n) {
        probe.theta(n) = phases.theta(n) + eps;
        const double up = objective(ch, probe, rx);
        probe.theta(n) = phases.theta(n) - eps;
        const double down = objective(ch, probe, rx);
        probe.theta(n) = phases.theta(n);
        out.d_theta(n) = (up - down) / (2.0 * eps);
    }
    return out;
}

}  // namespace effrank
}  // namespace risopt
