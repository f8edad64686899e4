#include "risopt/metrics.hpp"

#include <cmath>
#include <sstream>

#include "risopt/effective_rank.hpp"
#include "risopt/errors.hpp"

namespace risopt::metrics {

double capacity(const CMatrix& h, const CMatrix& rx, double sigma2) {
    if (!(sigma2 > 0.0)) {
        throw ParameterError("capacity: noise variance must be positive");
    }
    return numerics::logdet2_plus_identity(effrank::weighted_covariance(h, rx) / sigma2);
}

double capacity(const CMatrix& h, const InputCovariance& rx, double sigma2) {
    return capacity(h, rx.rx, sigma2);
}

double user_sinr(const CMatrix& h, const PrecoderSet& pre, int k) {
    if (pre.users() != h.rows()) {
        throw DimensionError("user_sinr: precoder count does not match user count");
    }
    if (k < 0 || k >= pre.users()) {
        std::ostringstream os;
        os << "user_sinr: user index " << k << " outside [0, " << pre.users() << ")";
        throw IndexError(os.str());
    }
    double interference = 0.0;
    double signal = 0.0;
    for (int j = 0; j < pre.users(); ++j) {
        const double gain = std::norm((h.row(k) * pre.vectors[j]).value());
        if (j == k) {
            signal = pre.powers(j) * gain;
        } else {
            interference += pre.powers(j) * gain;
        }
    }
    return signal / (interference + pre.sigma2);
}

RVector user_sinrs(const CMatrix& h, const PrecoderSet& pre) {
    RVector out(pre.users());
    for (int k = 0; k < pre.users(); ++k) {
        out(k) = user_sinr(h, pre, k);
    }
    return out;
}

double sum_rate(const RVector& sinrs) {
    if ((sinrs.array() < 0.0).any()) {
        throw ParameterError("sum_rate: SINR values must be nonnegative");
    }
    double bits = 0.0;
    for (Eigen::Index k = 0; k < sinrs.size(); ++k) {
        bits += std::log1p(sinrs(k));
    }
    return bits / std::log(2.0);
}

}  // namespace risopt::metrics
