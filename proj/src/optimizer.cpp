#include "risopt/optimizer.hpp"

#include <cmath>
#include <sstream>

#include "risopt/effective_rank.hpp"
#include "risopt/errors.hpp"
#include "risopt/metrics.hpp"

namespace risopt {

namespace {

constexpr double kMinStep = 1e-12;

}  // namespace

void OptimizerConfig::validate() const {
    std::ostringstream os;
    if (!(alpha > 0.0)) {
        os << "optimizer: alpha must be positive";
    } else if (!(gamma_tol > 0.0)) {
        os << "optimizer: gamma_tol must be positive";
    } else if (max_outer < 1 || max_inner < 1) {
        os << "optimizer: iteration caps must be at least 1";
    } else if (!(inner_tol >= 0.0)) {
        os << "optimizer: inner_tol must be nonnegative";
    } else if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
        os << "optimizer: backtrack_factor must lie in (0, 1)";
    } else {
        return;
    }
    throw ParameterError(os.str());
}

std::string_view scheme_name(CovarianceScheme s) {
    switch (s) {
        case CovarianceScheme::Upa:
            return "UPA";
        case CovarianceScheme::Wf:
            return "WF";
        case CovarianceScheme::MrtWf:
            return "MRT-WF";
        case CovarianceScheme::MmseWf:
            return "MMSE-WF";
    }
    return "?";
}

std::optional<CovarianceScheme> parse_scheme(std::string_view name) {
    for (auto s : {CovarianceScheme::Upa, CovarianceScheme::Wf, CovarianceScheme::MrtWf, CovarianceScheme::MmseWf}) {
        if (scheme_name(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

int OptimizationTrace::total_inner_steps() const {
    int total = 0;
    for (const auto& r : records) {
        total += r.inner_steps;
    }
    return total;
}

double OptimizationTrace::final_effective_rank() const {
    return records.empty() ? initial_effective_rank : records.back().effective_rank;
}

double OptimizationTrace::final_capacity() const {
    return records.empty() ? initial_capacity : records.back().capacity;
}

namespace optimizer {

AscentResult ascend_phases(const ChannelRealization& ch, const CMatrix& rx, const RisPhases& theta0,
                           const OptimizerConfig& cfg) {
    cfg.validate();
    AscentResult out;
    out.phases = theta0;

    EffRankEvaluation current = effrank::evaluate(ch, out.phases, rx);
    out.accepted_values.push_back(current.value);

    while (out.steps < cfg.max_inner) {
        const RVector& grad = current.gradient.d_theta;
        if (grad.norm() < cfg.inner_tol) {
            break;
        }
        bool accepted = false;
        for (double step = cfg.alpha; step >= kMinStep; step *= cfg.backtrack_factor) {
            RisPhases candidate{out.phases.theta + step * grad};
            EffRankEvaluation next = effrank::evaluate(ch, candidate, rx);
            if (next.value > current.value) {
                out.phases = std::move(candidate);
                current = std::move(next);
                out.step_size = step;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            break;
        }
        ++out.steps;
        out.accepted_values.push_back(current.value);
    }
    out.effective_rank = current.value;
    return out;
}

InputCovariance covariance_step(const CMatrix& h, CovarianceScheme scheme, double pt, double sigma2,
                                RVector& powers, std::optional<PrecoderSet>* precoders) {
    switch (scheme) {
        case CovarianceScheme::Upa:
            return precoding::upa_covariance(static_cast<int>(h.cols()), pt);
        case CovarianceScheme::Wf:
            return precoding::eigen_waterfill_covariance(h, pt, sigma2);
        case CovarianceScheme::MrtWf:
        case CovarianceScheme::MmseWf: {
            const auto kind = scheme == CovarianceScheme::MrtWf ? PrecodingScheme::Mrt : PrecodingScheme::Mmse;
            PrecoderSet pre = precoding::design_precoders(h, kind, pt, sigma2, powers);
            powers = pre.powers;
            InputCovariance rx = precoding::assemble_covariance(pre, pt);
            if (precoders) {
                *precoders = std::move(pre);
            }
            return rx;
        }
    }
    throw ParameterError("covariance_step: unknown scheme");
}

namespace {

// Covariance used to score theta0 before any water-filling: equal powers
// Pt/K on the scheme's precoders (or the scheme's fixed construction).
InputCovariance initial_covariance(const CMatrix& h, CovarianceScheme scheme, double pt, double sigma2,
                                   const RVector& powers, std::optional<PrecoderSet>* precoders) {
    if (!is_precoded(scheme)) {
        RVector unused = powers;
        return covariance_step(h, scheme, pt, sigma2, unused, precoders);
    }
    const int k_count = static_cast<int>(h.rows());
    std::vector<CVector> vectors(k_count);
    for (int k = 0; k < k_count; ++k) {
        vectors[k] = scheme == CovarianceScheme::MrtWf ? precoding::mrt_precoder(h, k)
                                                        : precoding::mmse_precoder(h, k, powers(k) / sigma2);
    }
    PrecoderSet pre = PrecoderSet::make(std::move(vectors), powers, sigma2);
    InputCovariance rx = precoding::assemble_covariance(pre, pt);
    *precoders = std::move(pre);
    return rx;
}

}  // namespace

OptimizationTrace alternate(const ChannelRealization& ch, CovarianceScheme scheme, double pt, double sigma2,
                            const RisPhases& theta0, const OptimizerConfig& cfg) {
    cfg.validate();
    ch.validate();
    const int k_count = static_cast<int>(ch.h2.rows());

    OptimizationTrace trace;
    trace.scheme = scheme;
    trace.phases = theta0;

    RVector powers = RVector::Constant(k_count, pt / k_count);
    std::optional<PrecoderSet> precoders;

    CMatrix h = composite_channel(ch, theta0);
    trace.covariance = initial_covariance(h, scheme, pt, sigma2, powers, &precoders);
    trace.precoders = precoders;
    trace.initial_effective_rank = effrank::effective_rank(effrank::weighted_covariance(h, trace.covariance.rx));
    trace.initial_capacity = metrics::capacity(h, trace.covariance, sigma2);

    double previous_e = trace.initial_effective_rank;
    for (int iteration = 1; iteration <= cfg.max_outer; ++iteration) {
        RVector next_powers = powers;
        std::optional<PrecoderSet> next_precoders;
        InputCovariance rx = covariance_step(h, scheme, pt, sigma2, next_powers, &next_precoders);
        AscentResult ascent = ascend_phases(ch, rx.rx, trace.phases, cfg);

        // The covariance update is not an ascent step, so a later iterate can
        // land below its predecessor; keep the better (earlier) state and stop.
        if (iteration > 1 && ascent.effective_rank < previous_e) {
            trace.stalled = true;
            return trace;
        }

        const CMatrix h_next = composite_channel(ch, ascent.phases);
        OuterRecord rec;
        rec.iteration = iteration;
        rec.effective_rank = ascent.effective_rank;
        rec.capacity = metrics::capacity(h_next, rx, sigma2);
        rec.inner_steps = ascent.steps;
        rec.step_size = ascent.step_size;
        trace.records.push_back(rec);

        trace.phases = std::move(ascent.phases);
        trace.covariance = std::move(rx);
        trace.precoders = std::move(next_precoders);
        powers = std::move(next_powers);
        h = h_next;

        if (std::abs(rec.effective_rank - previous_e) <= cfg.gamma_tol) {
            trace.converged = true;
            return trace;
        }
        previous_e = rec.effective_rank;
    }
    trace.capped = true;
    return trace;
}

}  // namespace optimizer
}  // namespace risopt
