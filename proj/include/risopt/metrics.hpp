#pragma once

#include "risopt/numerics.hpp"
#include "risopt/precoding.hpp"

namespace risopt::metrics {

/// log2 |I + H Rx H^H / sigma2| in bits/s/Hz.
double capacity(const CMatrix& h, const CMatrix& rx, double sigma2);
double capacity(const CMatrix& h, const InputCovariance& rx, double sigma2);

/// p_k |h_k v_k|^2 / (sum_{j != k} p_j |h_k v_j|^2 + sigma2).
double user_sinr(const CMatrix& h, const PrecoderSet& pre, int k);

RVector user_sinrs(const CMatrix& h, const PrecoderSet& pre);

/// sum_k log2(1 + SINR_k).
double sum_rate(const RVector& sinrs);

}  // namespace risopt::metrics
