#include "risopt/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "risopt/effective_rank.hpp"
#include "risopt/errors.hpp"

namespace risopt {

namespace {

constexpr double kMinEigengap = 1e-6;

CMatrix random_covariance(int m, double pt, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix b(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            b(i, j) = Complex(re, im);
        }
    }
    CMatrix rx = b * b.adjoint();
    rx = (rx + rx.adjoint()) * 0.5;
    return rx * (pt / rx.trace().real());
}

bool well_separated(const RVector& lambda) {
    for (Eigen::Index k = 0; k + 1 < lambda.size(); ++k) {
        if (lambda(k) - lambda(k + 1) <= kMinEigengap * lambda(0)) {
            return false;
        }
    }
    return true;
}

}  // namespace

double gradient_relative_error(const RVector& analytic, const RVector& reference) {
    if (analytic.size() != reference.size()) {
        throw DimensionError("gradient_relative_error: length mismatch");
    }
    const double scale = reference.size() > 0 ? reference.cwiseAbs().maxCoeff() : 0.0;
    double worst = 0.0;
    for (Eigen::Index n = 0; n < reference.size(); ++n) {
        const double denom = std::max({std::abs(reference(n)), 1e-6 * scale, 1e-300});
        worst = std::max(worst, std::abs(analytic(n) - reference(n)) / denom);
    }
    return worst;
}

GradcheckReport run_gradcheck(const SystemDims& dims, int instances, std::uint64_t master_seed, double pt,
                              double eps) {
    dims.validate();
    if (instances < 1) {
        throw ParameterError("gradcheck: need at least one instance");
    }
    GradcheckReport report;
    std::uint64_t index = 0;
    while (static_cast<int>(report.instances.size()) < instances) {
        Rng rng(derive_seed(master_seed, index));
        const ChannelRealization ch = sample_rayleigh(dims, false, rng);
        const RisPhases phases = RisPhases::uniform_random(dims.N, rng);
        const CMatrix rx = random_covariance(dims.M, pt, rng);

        const Spectrum s = Spectrum::of(effrank::weighted_covariance(composite_channel(ch, phases), rx));
        if (!well_separated(s.lambda)) {
            ++report.skipped;
            ++index;
            continue;
        }
        const RVector analytic = effrank::phase_gradient(ch, phases, rx).d_theta;
        const RVector numeric = effrank::finite_difference_gradient(ch, phases, rx, eps).d_theta;
        const double err = gradient_relative_error(analytic, numeric);
        report.instances.push_back({index, err});
        report.max_relative_error = std::max(report.max_relative_error, err);
        ++index;
    }
    return report;
}

}  // namespace risopt
