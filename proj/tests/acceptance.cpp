// Acceptance suite: one PASS/FAIL line per criterion; nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <string>

#include "risopt/effective_rank.hpp"
#include "risopt/gradcheck.hpp"
#include "risopt/metrics.hpp"
#include "risopt/optimizer.hpp"
#include "risopt/precoding.hpp"
#include "risopt/simulation.hpp"
#include "test_support.hpp"

using namespace risopt;
using risopt::testing::random_cmatrix;
using risopt::testing::random_psd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome gradient_correctness() {
    const auto t0 = Clock::now();
    const GradcheckReport rep = run_gradcheck({4, 3, 8}, 50, 1);
    const double t = seconds_since(t0);
    return {rep.instances.size() == 50 && rep.max_relative_error < 1e-5 && t < 10.0,
            fmt("max relative error %.3g over %zu instances (%d skipped), %.2f s", rep.max_relative_error,
                rep.instances.size(), rep.skipped, t)};
}

Outcome effective_rank_bounds() {
    std::mt19937_64 rng(2);
    bool ok = true;
    double worst_low = 1e300, worst_high = -1e300;
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 2 + trial % 7;
        const int rank = 1 + (trial / 7) % n;
        const CMatrix a = random_psd(n, rank, rng);
        const RVector lambda = numerics::psd_eig(a).eigenvalues;
        int numerical_rank = 0;
        for (Eigen::Index i = 0; i < lambda.size(); ++i) {
            numerical_rank += lambda(i) > 1e-12 * lambda(0) ? 1 : 0;
        }
        const double e = effrank::effective_rank(a);
        worst_low = std::min(worst_low, e - 1.0);
        worst_high = std::max(worst_high, e - numerical_rank);
        ok = ok && e >= 1.0 - 1e-12 && e <= numerical_rank + 1e-12;
    }

    // E = n iff the spectrum is uniform.
    bool iff = true;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 6;
        Eigen::HouseholderQR<CMatrix> qr(random_cmatrix(n, n, rng));
        const CMatrix q = qr.householderQ();
        const double c = 0.1 + trial;
        const CMatrix uniform = q * (c * CMatrix::Identity(n, n)) * q.adjoint();
        iff = iff && std::abs(effrank::effective_rank(uniform) - n) < 1e-10;
        RVector d = RVector::Constant(n, c);
        d(trial % n) *= 1.001;
        const CMatrix skewed = q * d.cast<Complex>().asDiagonal() * q.adjoint();
        iff = iff && effrank::effective_rank(skewed) < n - 1e-9;
    }

    CMatrix d211 = CMatrix::Zero(3, 3);
    d211(0, 0) = 2.0;
    d211(1, 1) = 1.0;
    d211(2, 2) = 1.0;
    const double e211 = effrank::effective_rank(d211);
    const bool exact = std::abs(e211 - 2.0 * std::numbers::sqrt2) < 1e-9;
    return {ok && iff && exact, fmt("10000 PSD within [1, rank] (min E-1 %.2g, max E-rank %.2g), uniform iff E=n: %s, "
                                    "E(diag(2,1,1)) = %.12f",
                                    worst_low, worst_high, iff ? "yes" : "no", e211)};
}

Outcome optimizer_agreement() {
    const auto t0 = Clock::now();
    bool monotone = true;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const ChannelRealization ch = sample_rayleigh({4, 3, 8}, false, rng);
        const RisPhases theta0 = RisPhases::uniform_random(8, rng);
        const AscentResult r = optimizer::ascend_phases(ch, random_psd(4, 4, rng), theta0, {});
        for (std::size_t i = 1; i < r.accepted_values.size(); ++i) {
            monotone = monotone && r.accepted_values[i] >= r.accepted_values[i - 1];
        }
    }

    // N=1, K=M=2 toy with a direct link (without it H has rank one for every theta).
    OptimizerConfig cfg;
    cfg.max_inner = 10000;
    constexpr int kGrid = 10000;
    double worst = 0.0;
    int toys = 0;
    for (std::uint64_t seed = 0; toys < 10; ++seed) {
        Rng rng(seed);
        const ChannelRealization ch = sample_rayleigh({2, 2, 1}, true, rng);
        const RisPhases theta0 = RisPhases::uniform_random(1, rng);
        const CMatrix rx = precoding::upa_covariance(2, 10.0).rx;
        std::vector<double> v(kGrid);
        for (int i = 0; i < kGrid; ++i) {
            v[i] = effrank::objective(ch, RisPhases{RVector::Constant(1, 2.0 * std::numbers::pi * i / kGrid)}, rx);
        }
        int peaks = 0;
        for (int i = 0; i < kGrid; ++i) {
            peaks += v[i] > v[(i + kGrid - 1) % kGrid] && v[i] >= v[(i + 1) % kGrid] ? 1 : 0;
        }
        if (peaks != 1) {
            continue;
        }
        const double best = *std::max_element(v.begin(), v.end());
        worst = std::max(worst, best - optimizer::ascend_phases(ch, rx, theta0, cfg).effective_rank);
        ++toys;
    }
    const double t = seconds_since(t0);
    return {monotone && worst <= 1e-3 && t < 5.0,
            fmt("accepted steps monotone: %s, worst grid shortfall %.3g on %d toys, %.2f s", monotone ? "yes" : "no",
                worst, toys, t)};
}

Outcome orthogonal_equivalence() {
    std::mt19937_64 rng(4);
    double worst_pair = 0.0, worst_closed = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 3 + trial % 4;
        const int k = 1 + trial % m;
        Eigen::HouseholderQR<CMatrix> qr(random_cmatrix(m, m, rng));
        const CMatrix q = qr.householderQ();
        const double norm = 0.2 + 0.1 * trial;
        const CMatrix h = norm * q.leftCols(k).transpose();
        RVector p(k);
        for (int i = 0; i < k; ++i) {
            p(i) = 0.5 + i;
        }
        const double sigma2 = 0.5 + trial % 3;
        std::vector<CVector> mrt, mmse;
        for (int i = 0; i < k; ++i) {
            mrt.push_back(precoding::mrt_precoder(h, i));
            mmse.push_back(precoding::mmse_precoder(h, i, p(i) / sigma2));
        }
        const PrecoderSet a = PrecoderSet::make(mrt, p, sigma2);
        const PrecoderSet b = PrecoderSet::make(mmse, p, sigma2);
        for (int i = 0; i < k; ++i) {
            const double sa = metrics::user_sinr(h, a, i);
            const double sb = metrics::user_sinr(h, b, i);
            const double closed = a.gamma(i) * h.row(i).squaredNorm();
            worst_pair = std::max(worst_pair, std::abs(sa - sb) / sa);
            worst_closed = std::max({worst_closed, std::abs(sa - closed) / closed, std::abs(sb - closed) / closed});
        }
    }
    return {worst_pair < 1e-9 && worst_closed < 1e-9,
            fmt("max relative MRT/MMSE SINR difference %.2g, max deviation from gamma*||h||^2 %.2g", worst_pair,
                worst_closed)};
}

SimulationConfig paired_config() {
    SimulationConfig cfg;
    cfg.realizations = 200;
    cfg.master_seed = 1;
    return cfg;
}

struct NSweep {
    std::vector<MetricsRecord> records;
    double seconds = 0.0;
};

const NSweep& n_sweep() {
    static const NSweep sweep = [] {
        SimulationConfig cfg = paired_config();
        cfg.sweep = SweepVariable::N;
        cfg.sweep_values = {4.0, 8.0, 16.0, 32.0};
        cfg.schemes = {CovarianceScheme::MrtWf, CovarianceScheme::MmseWf};
        const auto t0 = Clock::now();
        NSweep s{run_monte_carlo(cfg), 0.0};
        s.seconds = seconds_since(t0);
        return s;
    }();
    return sweep;
}

Outcome gap_trend() {
    const NSweep& s = n_sweep();
    // Records are (N, scheme) with two schemes per N; the gap is per N.
    const double gap4 = s.records.front().mean_gap;
    const double gap32 = s.records.back().mean_gap;
    return {gap32 < gap4 && s.seconds < 300.0,
            fmt("mean |C_MRT - C_MMSE|: N=4 %.4f, N=8 %.4f, N=16 %.4f, N=32 %.4f (200 seeds, %.1f s)", gap4,
                s.records[2].mean_gap, s.records[4].mean_gap, gap32, s.seconds)};
}

Outcome snr_trend() {
    SimulationConfig cfg = paired_config();
    const std::vector<MetricsRecord> r = run_monte_carlo(cfg);
    const std::size_t schemes = cfg.schemes.size();
    bool increasing = true;
    for (std::size_t s = 0; s < schemes; ++s) {
        for (std::size_t v = 1; v < cfg.sweep_values.size(); ++v) {
            increasing = increasing && r[v * schemes + s].mean_se > r[(v - 1) * schemes + s].mean_se;
        }
    }
    bool above_upa = true;
    std::string detail = fmt("strictly increasing in SNR: %s;", increasing ? "yes" : "no");
    for (std::size_t v = 0; v < cfg.sweep_values.size(); ++v) {
        if (cfg.sweep_values[v] < 10.0) {
            continue;
        }
        const double upa = r[v * schemes + 0].mean_se;
        const double mrt = r[v * schemes + 2].mean_se;
        const double mmse = r[v * schemes + 3].mean_se;
        above_upa = above_upa && mrt >= upa && mmse >= upa;
        detail += fmt(" %g dB UPA %.3f MRT-WF %.3f MMSE-WF %.3f;", cfg.sweep_values[v], upa, mrt, mmse);
    }
    detail.pop_back();
    return {increasing && above_upa, detail};
}

Outcome effective_rank_trend() {
    const NSweep& s = n_sweep();
    bool ok = true;
    std::string detail;
    for (std::size_t si = 0; si < 2; ++si) {
        int inversions = 0;
        bool small = true;
        detail += fmt("%s E:", si == 0 ? "MRT-WF" : "MMSE-WF");
        for (std::size_t v = 0; v < 4; ++v) {
            const double e = s.records[v * 2 + si].mean_effrank;
            detail += fmt(" %.4f", e);
            ok = ok && e <= 3.0 + 1e-12;
            if (v > 0) {
                const double drop = s.records[(v - 1) * 2 + si].mean_effrank - e;
                if (drop > 0.0) {
                    ++inversions;
                    small = small && drop <= 0.02;
                }
            }
        }
        ok = ok && inversions <= 1 && small;
        detail += si == 0 ? "; " : "";
    }
    return {ok, detail + " (bound 3)"};
}

Outcome waterfill_kkt() {
    std::mt19937_64 rng(8);
    std::lognormal_distribution<double> gain(0.0, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_sum = 0.0, worst_level = 0.0;
    bool inactive_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 1 + trial % 16;
        RVector g(k);
        for (int i = 0; i < k; ++i) {
            g(i) = unit(rng) < 0.05 ? 0.0 : gain(rng);
        }
        if (g.maxCoeff() == 0.0) {
            g(0) = 1.0;
        }
        const double pt = std::pow(10.0, 4.0 * unit(rng) - 2.0);
        const double sigma2 = 0.1 + unit(rng);
        const WaterFilling wf = precoding::waterfill(g, pt, sigma2);
        worst_sum = std::max(worst_sum, std::abs(wf.powers.sum() - pt) / pt);
        for (int i = 0; i < k; ++i) {
            if (wf.powers(i) > 0.0) {
                worst_level = std::max(worst_level, std::abs(wf.powers(i) + sigma2 / g(i) - wf.water_level));
            } else if (g(i) > 0.0) {
                inactive_ok = inactive_ok && wf.water_level <= sigma2 / g(i);
            }
        }
    }
    return {worst_sum <= 1e-10 && worst_level <= 1e-10 && inactive_ok,
            fmt("1000 vectors: max |sum p - Pt|/Pt %.2g, max water-level spread %.2g, inactive users below level: %s",
                worst_sum, worst_level, inactive_ok ? "yes" : "no")};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism() {
    const char* cli = std::getenv("RISOPT_CLI");
    if (!cli) {
        return {false, "RISOPT_CLI is not set"};
    }
    const fs::path dir = fs::temp_directory_path() / "risopt_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "c.json") << R"({"schema_version": 1, "realizations": 20, "seed": 3,
        "sweeps": {"snr_db": [0, 10, 20], "N": [4, 16], "M": [2, 4]}, "gradcheck": {"instances": 10}})";
    bool ok = true;
    int compared = 0;
    for (const std::string run : {"single --format json", "single", "sweep-snr", "sweep-n --format json", "sweep-m",
                                  "gradcheck"}) {
        std::string outputs[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path out = dir / fmt("out%d", rep);
            const std::string cmd = fmt("\"%s\" %s --config \"%s\" --out \"%s\" > /dev/null 2>&1", cli, run.c_str(),
                                        (dir / "c.json").c_str(), out.c_str());
            ok = ok && std::system(cmd.c_str()) == 0;
            outputs[rep] = slurp(out);
        }
        ok = ok && !outputs[0].empty() && outputs[0] == outputs[1];
        ++compared;
    }
    fs::remove_all(dir);
    return {ok, fmt("%d subcommand runs repeated, outputs byte-identical: %s", compared, ok ? "yes" : "no")};
}

Outcome capacity_identity() {
    std::mt19937_64 rng(10);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + trial % 6;
        const int k = 1 + trial % 5;
        const CMatrix h = random_cmatrix(k, m, rng);
        const CMatrix rx = random_psd(m, 1 + trial % m, rng);
        const CMatrix w = h * rx * h.adjoint();
        Eigen::ComplexEigenSolver<CMatrix> es(w);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            sum += std::log2(1.0 + std::max(0.0, es.eigenvalues()(i).real()));
        }
        worst = std::max(worst, std::abs(metrics::capacity(h, rx, 1.0) - sum) / sum);
    }
    return {worst < 1e-8, fmt("100 instances, max relative difference %.2g", worst)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"gradient correctness", gradient_correctness},
        {"effective-rank bounds", effective_rank_bounds},
        {"optimizer monotonicity and grid agreement", optimizer_agreement},
        {"orthogonal-channel MRT/MMSE equivalence", orthogonal_equivalence},
        {"MRT/MMSE capacity gap shrinks with N", gap_trend},
        {"SNR sweep trend", snr_trend},
        {"effective rank over N", effective_rank_trend},
        {"water-filling KKT", waterfill_kkt},
        {"CLI determinism", cli_determinism},
        {"capacity identity", capacity_identity},
    };
    int failed = 0;
    int index = 1;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
