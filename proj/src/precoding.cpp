#include "risopt/precoding.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "risopt/errors.hpp"

namespace risopt {

PrecoderSet PrecoderSet::make(std::vector<CVector> vectors, RVector powers, double sigma2) {
    if (static_cast<Eigen::Index>(vectors.size()) != powers.size()) {
        throw DimensionError("PrecoderSet: vector and power counts differ");
    }
    if (!(sigma2 > 0.0)) {
        throw ParameterError("PrecoderSet: noise variance must be positive");
    }
    if ((powers.array() < 0.0).any()) {
        throw ParameterError("PrecoderSet: powers must be nonnegative");
    }
    PrecoderSet out;
    out.vectors = std::move(vectors);
    out.powers = std::move(powers);
    out.sigma2 = sigma2;
    out.gamma = out.powers / sigma2;
    return out;
}

namespace precoding {

namespace {

void check_user(const CMatrix& h, int k, const char* what) {
    if (k < 0 || k >= h.rows()) {
        std::ostringstream os;
        os << what << ": user index " << k << " outside [0, " << h.rows() << ")";
        throw IndexError(os.str());
    }
}

void check_budget(double pt, double sigma2) {
    if (!(pt > 0.0)) {
        throw ParameterError("transmit power budget must be positive");
    }
    if (!(sigma2 > 0.0)) {
        throw ParameterError("noise variance must be positive");
    }
}

}  // namespace

CVector mrt_precoder(const CMatrix& h, int k) {
    check_user(h, k, "mrt_precoder");
    const CVector hk = h.row(k).adjoint();
    const double norm = hk.norm();
    if (!(norm > 0.0)) {
        std::ostringstream os;
        os << "mrt_precoder: channel row of user " << k << " is zero";
        throw DegenerateInputError(os.str());
    }
    return hk / norm;
}

CVector mmse_precoder(const CMatrix& h, int k, double gamma_k) {
    check_user(h, k, "mmse_precoder");
    if (!(gamma_k > 0.0)) {
        std::ostringstream os;
        os << "mmse_precoder: gamma must be positive, got " << gamma_k;
        throw ParameterError(os.str());
    }
    const Eigen::Index m = h.cols();
    const CMatrix gram = h.adjoint() * h + CMatrix::Identity(m, m) / gamma_k;
    const CVector w = numerics::solve_hermitian(gram, h.row(k).adjoint());
    const double norm = w.norm();
    if (!(norm > 0.0)) {
        std::ostringstream os;
        os << "mmse_precoder: channel row of user " << k << " is zero";
        throw DegenerateInputError(os.str());
    }
    return w / norm;
}

WaterFilling waterfill(const RVector& gains, double pt, double sigma2) {
    check_budget(pt, sigma2);
    if ((gains.array() < 0.0).any() || !gains.allFinite()) {
        throw ParameterError("waterfill: gains must be finite and nonnegative");
    }

    std::vector<Eigen::Index> active;
    for (Eigen::Index k = 0; k < gains.size(); ++k) {
        if (gains(k) > 0.0) {
            active.push_back(k);
        }
    }
    if (active.empty()) {
        throw DegenerateInputError("waterfill: all gains are zero");
    }

    // Inverse-gain floors sorted ascending; stable so ties keep index order.
    std::stable_sort(active.begin(), active.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return sigma2 / gains(a) < sigma2 / gains(b); });

    // Largest m such that the level over the m lowest floors lies above the m-th floor.
    double floor_sum = 0.0;
    double level = 0.0;
    for (std::size_t m = 0; m < active.size(); ++m) {
        const double floor_m = sigma2 / gains(active[m]);
        const double candidate = (pt + floor_sum + floor_m) / static_cast<double>(m + 1);
        if (m > 0 && candidate <= floor_m) {
            break;
        }
        floor_sum += floor_m;
        level = candidate;
    }

    WaterFilling out;
    out.powers = RVector::Zero(gains.size());
    out.water_level = level;
    for (Eigen::Index k : active) {
        out.powers(k) = std::max(0.0, level - sigma2 / gains(k));
    }
    return out;
}

InputCovariance assemble_covariance(const PrecoderSet& pre, double pt) {
    if (pre.vectors.empty()) {
        throw DimensionError("assemble_covariance: empty precoder set");
    }
    const Eigen::Index m = pre.vectors.front().size();
    CMatrix rx = CMatrix::Zero(m, m);
    for (int k = 0; k < pre.users(); ++k) {
        if (pre.vectors[k].size() != m) {
            throw DimensionError("assemble_covariance: precoder lengths differ");
        }
        rx.noalias() += pre.powers(k) * (pre.vectors[k] * pre.vectors[k].adjoint());
    }
    return InputCovariance{(rx + rx.adjoint()) * 0.5, pt};
}

InputCovariance upa_covariance(int m, double pt) {
    if (m < 1) {
        throw DimensionError("upa_covariance: antenna count must be positive");
    }
    if (!(pt > 0.0)) {
        throw ParameterError("upa_covariance: transmit power budget must be positive");
    }
    return InputCovariance{CMatrix::Identity(m, m) * (pt / m), pt};
}

InputCovariance eigen_waterfill_covariance(const CMatrix& h, double pt, double sigma2) {
    check_budget(pt, sigma2);
    if (!(h.norm() > 0.0)) {
        throw DegenerateInputError("eigen_waterfill_covariance: channel is zero");
    }
    // Right singular vectors of H are the eigenvectors of H^H H, with s_i^2 as eigenvalues.
    const HermitianEig eig = numerics::psd_eig(h.adjoint() * h);
    const WaterFilling wf = waterfill(eig.eigenvalues, pt, sigma2);
    const CMatrix rx = eig.eigenvectors * wf.powers.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
    return InputCovariance{(rx + rx.adjoint()) * 0.5, pt};
}

PrecoderSet design_precoders(const CMatrix& h, PrecodingScheme scheme, double pt, double sigma2,
                             const RVector& previous_powers) {
    check_budget(pt, sigma2);
    const int k_count = static_cast<int>(h.rows());
    if (previous_powers.size() != k_count) {
        throw DimensionError("design_precoders: previous power vector has wrong length");
    }

    std::vector<CVector> vectors(k_count);
    RVector gains(k_count);

    if (scheme == PrecodingScheme::Mrt) {
        for (int k = 0; k < k_count; ++k) {
            vectors[k] = mrt_precoder(h, k);
            gains(k) = h.row(k).squaredNorm();
        }
        RVector powers = waterfill(gains, pt, sigma2).powers;
        return PrecoderSet::make(std::move(vectors), std::move(powers), sigma2);
    }

    for (int k = 0; k < k_count; ++k) {
        const double gamma_prev = previous_powers(k) / sigma2;
        vectors[k] = gamma_prev > 0.0 ? mmse_precoder(h, k, gamma_prev) : mrt_precoder(h, k);
        gains(k) = std::norm((h.row(k) * vectors[k]).value());
    }
    RVector powers = waterfill(gains, pt, sigma2).powers;
    for (int k = 0; k < k_count; ++k) {
        if (powers(k) > 0.0) {
            vectors[k] = mmse_precoder(h, k, powers(k) / sigma2);
        }
    }
    return PrecoderSet::make(std::move(vectors), std::move(powers), sigma2);
}

}  // namespace precoding
}  // namespace risopt
