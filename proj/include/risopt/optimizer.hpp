#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "risopt/channel.hpp"
#include "risopt/precoding.hpp"

namespace risopt {

struct OptimizerConfig {
    double alpha = 0.1;             // initial learning rate per accepted step
    double gamma_tol = 1e-4;        // outer stop when |E_i - E_{i-1}| <= gamma_tol
    int max_outer = 50;
    int max_inner = 200;
    double inner_tol = 1e-6;        // inner stop when ||grad E|| < inner_tol
    double backtrack_factor = 0.5;

    void validate() const;
};

/// How the transmit covariance is chosen in each outer iteration.
enum class CovarianceScheme { Upa, Wf, MrtWf, MmseWf };

std::string_view scheme_name(CovarianceScheme s);
std::optional<CovarianceScheme> parse_scheme(std::string_view name);
inline bool is_precoded(CovarianceScheme s) {
    return s == CovarianceScheme::MrtWf || s == CovarianceScheme::MmseWf;
}

struct AscentResult {
    RisPhases phases;
    int steps = 0;
    double effective_rank = 0.0;
    double step_size = 0.0;                 // last accepted step, 0 if none
    std::vector<double> accepted_values;    // E at theta0 and after every accepted step
};

struct OuterRecord {
    int iteration = 0;
    double effective_rank = 0.0;
    double capacity = 0.0;
    int inner_steps = 0;
    double step_size = 0.0;
};

struct OptimizationTrace {
    CovarianceScheme scheme = CovarianceScheme::MrtWf;
    double initial_effective_rank = 0.0;
    double initial_capacity = 0.0;
    std::vector<OuterRecord> records;
    RisPhases phases;                       // raw (unwrapped) optimizer output
    InputCovariance covariance;
    std::optional<PrecoderSet> precoders;   // set for MRT-WF / MMSE-WF
    bool converged = false;
    bool capped = false;                    // hit max_outer without meeting gamma_tol
    bool stalled = false;                   // stopped because a new iterate lowered E

    int total_inner_steps() const;
    double final_effective_rank() const;
    double final_capacity() const;
};

namespace optimizer {

/// Backtracking gradient ascent of the effective rank over RIS phases for a
/// fixed Rx. Every accepted step strictly increases E. Stops after max_inner
/// accepted steps, when the gradient norm drops below inner_tol, or when no
/// step above 1e-12 improves E.
AscentResult ascend_phases(const ChannelRealization& ch, const CMatrix& rx, const RisPhases& theta0,
                           const OptimizerConfig& cfg);

/// Covariance produced by one power/precoder pass of the scheme at channel H.
/// `powers` carries the previous per-user powers in and the new ones out
/// (ignored for UPA and WF).
InputCovariance covariance_step(const CMatrix& h, CovarianceScheme scheme, double pt, double sigma2,
                                RVector& powers, std::optional<PrecoderSet>* precoders = nullptr);

/// Alternates covariance design and phase ascent until the effective rank
/// settles within gamma_tol or max_outer iterations have run.
OptimizationTrace alternate(const ChannelRealization& ch, CovarianceScheme scheme, double pt, double sigma2,
                            const RisPhases& theta0, const OptimizerConfig& cfg);

}  // namespace optimizer
}  // namespace risopt
