#pragma once

#include <vector>

#include "risopt/numerics.hpp"

namespace risopt {

/// Per-user unit-norm precoders v_k with powers p_k. gamma_k = p_k / sigma2.
struct PrecoderSet {
    std::vector<CVector> vectors;
    RVector powers;
    double sigma2 = 1.0;
    RVector gamma;

    static PrecoderSet make(std::vector<CVector> vectors, RVector powers, double sigma2);
    int users() const { return static_cast<int>(vectors.size()); }
};

/// Transmit covariance Rx with its trace budget Pt.
struct InputCovariance {
    CMatrix rx;
    double trace_budget = 0.0;
};

struct WaterFilling {
    RVector powers;
    double water_level = 0.0;  // mu; active users satisfy p_k = mu - sigma2 / g_k
};

enum class PrecodingScheme { Mrt, Mmse };

namespace precoding {

/// h_k^H / ||h_k|| with h_k the k-th row of H.
CVector mrt_precoder(const CMatrix& h, int k);

/// Normalized (H^H H + I / gamma_k)^{-1} h_k^H.
CVector mmse_precoder(const CMatrix& h, int k, double gamma_k);

/// Exact water-filling over p_k = max(0, mu - sigma2 / g_k) with sum p_k = Pt.
/// The water level is located from the sorted inverse-gain breakpoints.
/// Zero gains receive zero power; all-zero gains throw DegenerateInputError.
WaterFilling waterfill(const RVector& gains, double pt, double sigma2);

/// Rx = sum_k p_k v_k v_k^H.
InputCovariance assemble_covariance(const PrecoderSet& pre, double pt);

/// Rx = (Pt / M) I.
InputCovariance upa_covariance(int m, double pt);

/// Eigenmode water-filling on the right singular vectors of H.
InputCovariance eigen_waterfill_covariance(const CMatrix& h, double pt, double sigma2);

/// One power-then-precoder pass. Powers come from water-filling over the
/// per-user gains (||h_k||^2 for MRT, |h_k v_k|^2 for MMSE with v_k built
/// from `previous_powers`), then MMSE precoders are rebuilt from the new
/// gamma_k. Users left with zero power keep their previous direction.
PrecoderSet design_precoders(const CMatrix& h, PrecodingScheme scheme, double pt, double sigma2,
                             const RVector& previous_powers);

}  // namespace precoding
}  // namespace risopt
