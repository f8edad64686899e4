#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "risopt/effective_rank.hpp"
#include "risopt/errors.hpp"
#include "risopt/gradcheck.hpp"
#include "test_support.hpp"

using namespace risopt;
using risopt::testing::random_cmatrix;
using risopt::testing::random_psd;

namespace {

CMatrix diag(std::initializer_list<double> values) {
    RVector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) {
        v(i++) = x;
    }
    return v.cast<Complex>().asDiagonal();
}

Spectrum spectrum_of(std::initializer_list<double> values) {
    return Spectrum::of(diag(values));
}

struct Instance {
    ChannelRealization ch;
    RisPhases phases;
    CMatrix rx;
};

Instance make_instance(const SystemDims& d, std::uint64_t seed) {
    Rng rng(seed);
    Instance inst;
    inst.ch = sample_rayleigh(d, false, rng);
    inst.phases = RisPhases::uniform_random(d.N, rng);
    inst.rx = random_psd(d.M, d.M, rng);
    return inst;
}

}  // namespace

TEST_CASE("effective rank closed forms") {
    CHECK(effrank::effective_rank(CMatrix::Identity(3, 3)) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(effrank::effective_rank(diag({5.0, 0.0, 0.0})) == doctest::Approx(1.0).epsilon(1e-14));
    // p = (1/2, 1/4, 1/4): entropy 1.5 ln 2
    CHECK(std::abs(effrank::effective_rank(diag({2.0, 1.0, 1.0})) - 2.0 * std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("effective rank of the zero matrix is undefined") {
    CHECK_THROWS_AS(effrank::effective_rank(CMatrix::Zero(3, 3)), DegenerateInputError);
    CHECK_THROWS_AS(effrank::eigen_gradient(spectrum_of({0.0, 0.0})), DegenerateInputError);
}

TEST_CASE("effective rank bounds and scale invariance on random PSD matrices") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 150; ++trial) {
        const int n = 1 + trial % 6;
        const int rank = 1 + (trial / 6) % n;
        const CMatrix a = random_psd(n, rank, rng);
        const double e = effrank::effective_rank(a);
        const RVector lambda = numerics::psd_eig(a).eigenvalues;
        const int numerical_rank = static_cast<int>((lambda.array() > 1e-10 * lambda(0)).count());
        CHECK(e >= 1.0 - 1e-12);
        CHECK(e <= numerical_rank + 1e-12);
        const double scaled = effrank::effective_rank(a * 37.5);
        CHECK(std::abs(scaled - e) <= 1e-12 * e);
    }
}

TEST_CASE("effective rank equals the dimension exactly for uniform spectra") {
    for (int n = 1; n <= 6; ++n) {
        CHECK(effrank::effective_rank(CMatrix::Identity(n, n) * 2.5) == doctest::Approx(n).epsilon(1e-13));
        CMatrix perturbed = CMatrix::Identity(n, n);
        if (n > 1) {
            perturbed(0, 0) = 1.01;
            CHECK(effrank::effective_rank(perturbed) < n - 1e-6);
        }
    }
}

TEST_CASE("eigen gradient") {
    SUBCASE("uniform spectrum is stationary") {
        const RVector g = effrank::eigen_gradient(spectrum_of({4.0, 4.0, 4.0}));
        CHECK(g.cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("matches central differences for lambda = (2, 1)") {
        const Spectrum s = spectrum_of({2.0, 1.0});
        const RVector g = effrank::eigen_gradient(s);
        const double h = 1e-6;
        const double fd0 = (effrank::effective_rank(diag({2.0 + h, 1.0})) -
                            effrank::effective_rank(diag({2.0 - h, 1.0}))) / (2 * h);
        const double fd1 = (effrank::effective_rank(diag({2.0, 1.0 + h})) -
                            effrank::effective_rank(diag({2.0, 1.0 - h}))) / (2 * h);
        CHECK(std::abs(g(0) - fd0) < 1e-5 * std::abs(fd0));
        CHECK(std::abs(g(1) - fd1) < 1e-5 * std::abs(fd1));
        CHECK(g(0) < 0.0);
        CHECK(g(1) > 0.0);
    }
    SUBCASE("orthogonal to the spectrum (scale invariance)") {
        std::mt19937_64 rng(4);
        for (int trial = 0; trial < 30; ++trial) {
            const Spectrum s = Spectrum::of(random_psd(4, 4, rng));
            const RVector g = effrank::eigen_gradient(s);
            CHECK(std::abs(g.dot(s.lambda)) < 1e-9 * effrank::effective_rank(s));
        }
    }
    SUBCASE("zero eigenvalues are dropped") {
        const RVector g = effrank::eigen_gradient(spectrum_of({3.0, 1.0, 0.0}));
        const RVector g2 = effrank::eigen_gradient(spectrum_of({3.0, 1.0}));
        CHECK(g.allFinite());
        CHECK(std::abs(g(0) - g2(0)) < 1e-15);
        CHECK(std::abs(g(1) - g2(1)) < 1e-15);
        CHECK(g(2) > 0.0);
    }
}

TEST_CASE("phase gradient special cases") {
    SUBCASE("zero covariance is degenerate") {
        const Instance inst = make_instance({4, 3, 8}, 1);
        CHECK_THROWS_AS(effrank::phase_gradient(inst.ch, inst.phases, CMatrix::Zero(4, 4)), DegenerateInputError);
    }
    SUBCASE("single user has a flat objective") {
        const Instance inst = make_instance({4, 1, 8}, 2);
        const RVector g = effrank::phase_gradient(inst.ch, inst.phases, inst.rx).d_theta;
        CHECK(g.cwiseAbs().maxCoeff() < 1e-12);
        const RVector fd = effrank::finite_difference_gradient(inst.ch, inst.phases, inst.rx).d_theta;
        CHECK(fd.cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("covariance dimension mismatch") {
        const Instance inst = make_instance({4, 3, 8}, 3);
        CHECK_THROWS_AS(effrank::phase_gradient(inst.ch, inst.phases, CMatrix::Identity(3, 3)), DimensionError);
    }
}

TEST_CASE("evaluate agrees with objective") {
    const Instance inst = make_instance({4, 3, 8}, 5);
    const EffRankEvaluation ev = effrank::evaluate(inst.ch, inst.phases, inst.rx);
    CHECK(ev.value == effrank::objective(inst.ch, inst.phases, inst.rx));
}

TEST_CASE("analytic phase gradient matches central differences") {
    int checked = 0;
    for (std::uint64_t seed = 0; checked < 50; ++seed) {
        const Instance inst = make_instance({4, 3, 8}, 1000 + seed);
        const Spectrum s = Spectrum::of(
            effrank::weighted_covariance(composite_channel(inst.ch, inst.phases), inst.rx));
        if ((s.lambda(0) - s.lambda(1)) <= 1e-6 * s.lambda(0) || (s.lambda(1) - s.lambda(2)) <= 1e-6 * s.lambda(0)) {
            continue;
        }
        const RVector an = effrank::phase_gradient(inst.ch, inst.phases, inst.rx).d_theta;
        const RVector fd = effrank::finite_difference_gradient(inst.ch, inst.phases, inst.rx, 1e-5).d_theta;
        CHECK(gradient_relative_error(an, fd) < 1e-5);
        ++checked;
    }
}

TEST_CASE("finite differences are stable across step sizes") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Instance inst = make_instance({4, 3, 8}, 500 + seed);
        const RVector g4 = effrank::finite_difference_gradient(inst.ch, inst.phases, inst.rx, 1e-4).d_theta;
        const RVector g5 = effrank::finite_difference_gradient(inst.ch, inst.phases, inst.rx, 1e-5).d_theta;
        const RVector g6 = effrank::finite_difference_gradient(inst.ch, inst.phases, inst.rx, 1e-6).d_theta;
        CHECK(gradient_relative_error(g4, g6) < 1e-4);
        CHECK(gradient_relative_error(g5, g6) < 1e-4);
    }
}

TEST_CASE("finite difference step must be in range") {
    const Instance inst = make_instance({4, 3, 8}, 9);
    CHECK_THROWS_AS(effrank::finite_difference_gradient(inst.ch, inst.phases, inst.rx, 1e-2), ParameterError);
    CHECK_THROWS_AS(effrank::finite_difference_gradient(inst.ch, inst.phases, inst.rx, 1e-9), ParameterError);
}

TEST_CASE("gradient_relative_error") {
    RVector a(3), b(3);
    a << 1.0, 2.0, 0.0;
    b << 1.0, 2.0, 0.0;
    CHECK(gradient_relative_error(a, b) == 0.0);
    a(1) = 2.002;
    CHECK(gradient_relative_error(a, b) == doctest::Approx(1e-3));
    CHECK_THROWS_AS(gradient_relative_error(RVector::Zero(2), b), DimensionError);
}

TEST_CASE("run_gradcheck over seeded instances") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const GradcheckReport rep = run_gradcheck({4, 3, 8}, 20, seed);
        CHECK(rep.instances.size() == 20);
        CHECK(rep.max_relative_error < 1e-5);
    }
    const GradcheckReport rep = run_gradcheck({4, 3, 8}, 20, 3);
    CHECK(rep.instances.size() == 20);
    CHECK(rep.max_relative_error < 1e-5);
}
