#pragma once

#include <cstdint>
#include <vector>

#include "risopt/channel.hpp"

namespace risopt {

struct GradcheckInstance {
    std::uint64_t index = 0;
    double max_relative_error = 0.0;
};

struct GradcheckReport {
    std::vector<GradcheckInstance> instances;
    int skipped = 0;  // draws rejected for a near-repeated spectrum
    double max_relative_error = 0.0;
};

/// Largest entrywise relative deviation of `analytic` from `reference`.
/// Entries are scaled by max(|reference_n|, 1e-6 * ||reference||_inf) so that
/// entries which vanish by symmetry do not inflate the figure.
double gradient_relative_error(const RVector& analytic, const RVector& reference);

/// Compares the analytic phase gradient with central differences on
/// `instances` seeded draws of (channel, random PSD Rx with trace pt, random
/// phases). Draws whose weighted covariance has an eigengap below
/// 1e-6 * lambda_max are skipped and replaced.
GradcheckReport run_gradcheck(const SystemDims& dims, int instances, std::uint64_t master_seed, double pt = 10.0,
                              double eps = 1e-5);

}  // namespace risopt
