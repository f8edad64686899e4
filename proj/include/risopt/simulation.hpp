#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "risopt/channel.hpp"
#include "risopt/optimizer.hpp"

namespace risopt {

enum class SweepVariable { Snr, N, M };
enum class RisMode { Optimized, Random, Identity };

std::string_view sweep_name(SweepVariable v);   // "snr_db", "N", "M"
std::string_view ris_mode_name(RisMode m);
std::optional<RisMode> parse_ris_mode(std::string_view name);

struct SimulationConfig {
    SystemDims dims{};
    double pt = 10.0;
    double sigma2 = 1.0;
    bool direct_link = false;
    std::vector<CovarianceScheme> schemes{CovarianceScheme::Upa, CovarianceScheme::Wf, CovarianceScheme::MrtWf,
                                          CovarianceScheme::MmseWf};
    int realizations = 1000;
    std::uint64_t master_seed = 1;
    SweepVariable sweep = SweepVariable::Snr;
    std::vector<double> sweep_values{0.0, 5.0, 10.0, 15.0, 20.0};
    OptimizerConfig optimizer{};
    RisMode ris_mode = RisMode::Optimized;
    int threads = 0;  // 0: hardware concurrency, capped by RISOPT_THREADS

    void validate() const;
    /// Copy of this configuration with the swept variable set to `value`.
    /// SNR values are in dB and set Pt = sigma2 * 10^(value / 10).
    SimulationConfig at(double value) const;
};

/// Metrics of one scheme on one realization.
struct SchemeOutcome {
    double capacity = 0.0;
    double effective_rank = 0.0;
    std::optional<double> sum_rate;  // precoded schemes only
    bool capped = false;
};

/// Runs every configured scheme on realization `index` of a (non-swept)
/// configuration. Outcomes follow cfg.schemes order.
std::vector<SchemeOutcome> evaluate_realization(const SimulationConfig& cfg, std::uint64_t index);

struct MetricsRecord {
    SweepVariable sweep_var = SweepVariable::Snr;
    double sweep_value = 0.0;
    CovarianceScheme scheme = CovarianceScheme::MrtWf;
    double mean_se = 0.0;         // log-det capacity, bits/s/Hz
    double ci95 = 0.0;            // normal-approximation half-width of mean_se
    double mean_effrank = 0.0;
    double mean_gap = 0.0;        // mean |C_MRT - C_MMSE|; 0 unless both schemes run
    int realizations = 0;         // realizations that contributed
    int capped_count = 0;
    int failed_count = 0;         // excluded degenerate realizations
    std::optional<double> mean_sum_rate;
};

/// Seeded Monte-Carlo sweep. Realization r always uses derive_seed(master, r),
/// so every sweep value and scheme sees the same seed set. Results do not
/// depend on the worker count. Throws Error when 1% or more of the
/// realizations at a sweep value fail.
std::vector<MetricsRecord> run_monte_carlo(const SimulationConfig& cfg);

int worker_count(int requested);

}  // namespace risopt
