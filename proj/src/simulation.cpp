#include "risopt/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "risopt/effective_rank.hpp"
#include "risopt/errors.hpp"
#include "risopt/metrics.hpp"

namespace risopt {

std::string_view sweep_name(SweepVariable v) {
    switch (v) {
        case SweepVariable::Snr:
            return "snr_db";
        case SweepVariable::N:
            return "N";
        case SweepVariable::M:
            return "M";
    }
    return "?";
}

std::string_view ris_mode_name(RisMode m) {
    switch (m) {
        case RisMode::Optimized:
            return "optimized";
        case RisMode::Random:
            return "random";
        case RisMode::Identity:
            return "identity";
    }
    return "?";
}

std::optional<RisMode> parse_ris_mode(std::string_view name) {
    for (auto m : {RisMode::Optimized, RisMode::Random, RisMode::Identity}) {
        if (ris_mode_name(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

void SimulationConfig::validate() const {
    dims.validate();
    optimizer.validate();
    if (!(pt > 0.0) || !(sigma2 > 0.0)) {
        throw ParameterError("simulation: pt and sigma2 must be positive");
    }
    if (realizations < 1) {
        throw ParameterError("simulation: realizations must be at least 1");
    }
    if (schemes.empty()) {
        throw ParameterError("simulation: no schemes selected");
    }
    if (sweep_values.empty()) {
        throw ParameterError("simulation: sweep has no values");
    }
    for (std::size_t i = 0; i < sweep_values.size(); ++i) {
        const double v = sweep_values[i];
        if (!std::isfinite(v)) {
            throw ParameterError("simulation: sweep values must be finite");
        }
        if (sweep != SweepVariable::Snr && (v < 1.0 || v != std::floor(v))) {
            throw ParameterError("simulation: N and M sweep values must be positive integers");
        }
        if (i > 0 && !(v > sweep_values[i - 1])) {
            throw ParameterError("simulation: sweep values must be strictly increasing");
        }
    }
}

SimulationConfig SimulationConfig::at(double value) const {
    SimulationConfig out = *this;
    switch (sweep) {
        case SweepVariable::Snr:
            out.pt = sigma2 * std::pow(10.0, value / 10.0);
            break;
        case SweepVariable::N:
            out.dims.N = static_cast<int>(value);
            break;
        case SweepVariable::M:
            out.dims.M = static_cast<int>(value);
            break;
    }
    return out;
}

std::vector<SchemeOutcome> evaluate_realization(const SimulationConfig& cfg, std::uint64_t index) {
    Rng rng(derive_seed(cfg.master_seed, index));
    const ChannelRealization ch = sample_rayleigh(cfg.dims, cfg.direct_link, rng);
    const RisPhases theta0 = RisPhases::uniform_random(cfg.dims.N, rng);

    std::vector<SchemeOutcome> out;
    out.reserve(cfg.schemes.size());
    for (CovarianceScheme scheme : cfg.schemes) {
        SchemeOutcome o;
        CMatrix h;
        InputCovariance rx;
        std::optional<PrecoderSet> pre;
        if (cfg.ris_mode == RisMode::Optimized) {
            OptimizationTrace trace = optimizer::alternate(ch, scheme, cfg.pt, cfg.sigma2, theta0, cfg.optimizer);
            h = composite_channel(ch, trace.phases);
            rx = std::move(trace.covariance);
            pre = std::move(trace.precoders);
            o.capped = trace.capped;
        } else {
            const RisPhases phases = cfg.ris_mode == RisMode::Random ? theta0 : RisPhases::zeros(cfg.dims.N);
            h = composite_channel(ch, phases);
            RVector powers = RVector::Constant(cfg.dims.K, cfg.pt / cfg.dims.K);
            rx = optimizer::covariance_step(h, scheme, cfg.pt, cfg.sigma2, powers, &pre);
        }
        o.capacity = metrics::capacity(h, rx, cfg.sigma2);
        o.effective_rank = effrank::effective_rank(effrank::weighted_covariance(h, rx.rx));
        if (pre) {
            o.sum_rate = metrics::sum_rate(metrics::user_sinrs(h, *pre));
        }
        out.push_back(o);
    }
    return out;
}

int worker_count(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RISOPT_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) {
            n = std::min(n, cap);
        }
    }
    return std::max(1, n);
}

namespace {

struct Slot {
    std::vector<SchemeOutcome> outcomes;
    bool failed = false;
};

std::vector<Slot> run_point(const SimulationConfig& cfg) {
    std::vector<Slot> slots(cfg.realizations);
    std::atomic<int> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    auto worker = [&] {
        for (int r = next++; r < cfg.realizations; r = next++) {
            try {
                slots[r].outcomes = evaluate_realization(cfg, static_cast<std::uint64_t>(r));
            } catch (const DegenerateInputError&) {
                slots[r].failed = true;
            } catch (const SingularityError&) {
                slots[r].failed = true;
            } catch (...) {
                std::lock_guard lock(fatal_mutex);
                if (!fatal) {
                    fatal = std::current_exception();
                }
                next = cfg.realizations;
            }
        }
    };

    const int workers = std::min(worker_count(cfg.threads), cfg.realizations);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (fatal) {
        std::rethrow_exception(fatal);
    }
    return slots;
}

}  // namespace

std::vector<MetricsRecord> run_monte_carlo(const SimulationConfig& cfg) {
    cfg.validate();

    const auto find_scheme = [&](CovarianceScheme s) -> std::optional<std::size_t> {
        auto it = std::find(cfg.schemes.begin(), cfg.schemes.end(), s);
        if (it == cfg.schemes.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - cfg.schemes.begin());
    };
    const auto mrt = find_scheme(CovarianceScheme::MrtWf);
    const auto mmse = find_scheme(CovarianceScheme::MmseWf);

    std::vector<MetricsRecord> records;
    for (double value : cfg.sweep_values) {
        const SimulationConfig point = cfg.at(value);
        point.dims.validate();
        const std::vector<Slot> slots = run_point(point);

        int failed = 0;
        for (const Slot& s : slots) {
            failed += s.failed ? 1 : 0;
        }
        if (failed * 100 >= cfg.realizations && failed > 0) {
            std::ostringstream os;
            os << failed << " of " << cfg.realizations << " realizations failed at " << sweep_name(cfg.sweep)
               << " = " << value;
            throw Error(os.str());
        }
        const int used = cfg.realizations - failed;

        // Gap between MRT and MMSE capacity, accumulated in realization order.
        double gap_sum = 0.0;
        if (mrt && mmse) {
            for (const Slot& s : slots) {
                if (!s.failed) {
                    gap_sum += std::abs(s.outcomes[*mrt].capacity - s.outcomes[*mmse].capacity);
                }
            }
        }

        for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
            double se_sum = 0.0;
            double er_sum = 0.0;
            double sr_sum = 0.0;
            bool has_sum_rate = false;
            int capped = 0;
            for (const Slot& s : slots) {
                if (s.failed) {
                    continue;
                }
                const SchemeOutcome& o = s.outcomes[si];
                se_sum += o.capacity;
                er_sum += o.effective_rank;
                if (o.sum_rate) {
                    sr_sum += *o.sum_rate;
                    has_sum_rate = true;
                }
                capped += o.capped ? 1 : 0;
            }
            MetricsRecord rec;
            rec.sweep_var = cfg.sweep;
            rec.sweep_value = value;
            rec.scheme = cfg.schemes[si];
            rec.realizations = used;
            rec.failed_count = failed;
            rec.capped_count = capped;
            rec.mean_se = se_sum / used;
            rec.mean_effrank = er_sum / used;
            rec.mean_gap = (mrt && mmse) ? gap_sum / used : 0.0;
            if (has_sum_rate) {
                rec.mean_sum_rate = sr_sum / used;
            }
            if (used > 1) {
                double sq = 0.0;
                for (const Slot& s : slots) {
                    if (!s.failed) {
                        const double d = s.outcomes[si].capacity - rec.mean_se;
                        sq += d * d;
                    }
                }
                rec.ci95 = 1.96 * std::sqrt(sq / (used - 1) / used);
            }
            records.push_back(rec);
        }
    }
    return records;
}

}  // namespace risopt
