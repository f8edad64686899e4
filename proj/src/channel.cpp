#include "risopt/channel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "risopt/errors.hpp"

namespace risopt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CMatrix sample_cn(int rows, int cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            out(i, j) = Complex(re, im);
        }
    }
    return out;
}

void expect_shape(const CMatrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << "channel: " << name << " is " << m.rows() << "x" << m.cols() << ", expected " << rows << "x"
           << cols;
        throw DimensionError(os.str());
    }
}

nlohmann::json matrix_to_json(const CMatrix& m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const nlohmann::json& j, int rows, int cols, const char* name) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows) {
        throw DimensionError(std::string("channel json: ") + name + " has wrong row count");
    }
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols) {
            throw DimensionError(std::string("channel json: ") + name + " has wrong column count");
        }
        for (int c = 0; c < cols; ++c) {
            const auto& z = row[c];
            if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
                throw DomainError(std::string("channel json: ") + name + " entries must be [re, im] pairs");
            }
            m(i, c) = Complex(z[0].get<double>(), z[1].get<double>());
        }
    }
    return m;
}

}  // namespace

void SystemDims::validate() const {
    if (M < 1 || K < 1 || N < 1) {
        std::ostringstream os;
        os << "system dims must be positive (M=" << M << ", K=" << K << ", N=" << N << ")";
        throw DimensionError(os.str());
    }
}

SystemDims ChannelRealization::dims() const {
    return SystemDims{static_cast<int>(h1.cols()), static_cast<int>(h2.rows()), static_cast<int>(h1.rows())};
}

void ChannelRealization::validate() const {
    const SystemDims d = dims();
    d.validate();
    expect_shape(h2, d.K, d.N, "H2");
    expect_shape(g, d.K, d.M, "G");
    if (!numerics::all_finite(h1) || !numerics::all_finite(h2) || !numerics::all_finite(g)) {
        throw DomainError("channel: non-finite entries");
    }
}

double wrap_phase(double theta) {
    double w = std::fmod(theta, kTwoPi);
    if (w < 0.0) {
        w += kTwoPi;
    }
    // fmod of a tiny negative value can round up to exactly 2pi
    if (w >= kTwoPi) {
        w = 0.0;
    }
    return w;
}

RisPhases RisPhases::wrapped() const {
    RisPhases out{theta};
    for (Eigen::Index i = 0; i < out.theta.size(); ++i) {
        out.theta(i) = wrap_phase(out.theta(i));
    }
    return out;
}

RisPhases RisPhases::zeros(int n) {
    return RisPhases{RVector::Zero(n)};
}

RisPhases RisPhases::uniform_random(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
    RisPhases out{RVector(n)};
    for (int i = 0; i < n; ++i) {
        out.theta(i) = uniform(rng);
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

ChannelRealization sample_rayleigh(const SystemDims& dims, bool direct_link, Rng& rng) {
    dims.validate();
    ChannelRealization ch;
    ch.h1 = sample_cn(dims.N, dims.M, rng);
    ch.h2 = sample_cn(dims.K, dims.N, rng);
    ch.g = direct_link ? sample_cn(dims.K, dims.M, rng) : CMatrix::Zero(dims.K, dims.M);
    return ch;
}

CMatrix composite_channel(const ChannelRealization& ch, const RisPhases& phases) {
    if (phases.size() != ch.h1.rows() || ch.h2.cols() != ch.h1.rows()) {
        std::ostringstream os;
        os << "composite_channel: " << phases.size() << " phases for " << ch.h1.rows() << " RIS elements";
        throw DimensionError(os.str());
    }
    if (ch.g.rows() != ch.h2.rows() || ch.g.cols() != ch.h1.cols()) {
        throw DimensionError("composite_channel: direct link shape mismatch");
    }
    CVector phi(phases.size());
    for (int n = 0; n < phases.size(); ++n) {
        phi(n) = std::polar(1.0, phases.theta(n));
    }
    return ch.g + ch.h2 * phi.asDiagonal() * ch.h1;
}

CMatrix channel_phase_derivative(const ChannelRealization& ch, const RisPhases& phases, int n) {
    if (n < 0 || n >= ch.h1.rows()) {
        std::ostringstream os;
        os << "channel_phase_derivative: element index " << n << " outside [0, " << ch.h1.rows() << ")";
        throw IndexError(os.str());
    }
    if (phases.size() != ch.h1.rows()) {
        throw DimensionError("channel_phase_derivative: phase vector length mismatch");
    }
    const Complex factor = Complex(0.0, 1.0) * std::polar(1.0, phases.theta(n));
    return factor * (ch.h2.col(n) * ch.h1.row(n));
}

std::string channel_to_json(const ChannelRealization& ch, std::optional<std::uint64_t> seed) {
    ch.validate();
    const SystemDims d = ch.dims();
    nlohmann::json j;
    j["dims"] = {{"M", d.M}, {"K", d.K}, {"N", d.N}};
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    j["H1"] = matrix_to_json(ch.h1);
    j["H2"] = matrix_to_json(ch.h2);
    j["G"] = matrix_to_json(ch.g);
    return j.dump(2);
}

LoadedChannel channel_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("channel json: ") + e.what());
    }
    try {
        SystemDims d{j.at("dims").at("M").get<int>(), j.at("dims").at("K").get<int>(),
                     j.at("dims").at("N").get<int>()};
        d.validate();
        LoadedChannel out;
        out.channel.h1 = matrix_from_json(j.at("H1"), d.N, d.M, "H1");
        out.channel.h2 = matrix_from_json(j.at("H2"), d.K, d.N, "H2");
        out.channel.g = matrix_from_json(j.at("G"), d.K, d.M, "G");
        if (j.contains("seed") && !j["seed"].is_null()) {
            out.seed = j["seed"].get<std::uint64_t>();
        }
        out.channel.validate();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("channel json: ") + e.what());
    }
}

}  // namespace risopt
