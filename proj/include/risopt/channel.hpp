#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "risopt/numerics.hpp"

namespace risopt {

/// BS antenna count M, user count K and RIS element count N.
struct SystemDims {
    int M = 4;
    int K = 3;
    int N = 8;

    void validate() const;
    friend bool operator==(const SystemDims&, const SystemDims&) = default;
};

/// One fading draw. Rows of h2 and g belong to users.
struct ChannelRealization {
    CMatrix h1;  // N x M, BS -> RIS
    CMatrix h2;  // K x N, RIS -> users
    CMatrix g;   // K x M, BS -> users (all-zero without a direct link)

    SystemDims dims() const;
    /// Throws DimensionError/DomainError on inconsistent shapes or non-finite entries.
    void validate() const;
};

/// RIS phase vector in radians. Optimizers keep raw (unwrapped) values;
/// wrapped() gives the canonical [0, 2pi) representative for reporting.
struct RisPhases {
    RVector theta;

    int size() const { return static_cast<int>(theta.size()); }
    RisPhases wrapped() const;

    static RisPhases zeros(int n);
    static RisPhases uniform_random(int n, std::mt19937_64& rng);
};

using Rng = std::mt19937_64;

/// Child seed for realization `index`, a splitmix64 mix of the master seed
/// and the index. Independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

double wrap_phase(double theta);

/// Entries are i.i.d. CN(0, 1): real and imaginary parts each N(0, 1/2).
ChannelRealization sample_rayleigh(const SystemDims& dims, bool direct_link, Rng& rng);

/// H = G + H2 diag(e^{j theta}) H1.
CMatrix composite_channel(const ChannelRealization& ch, const RisPhases& phases);

/// dH/dtheta_n = j e^{j theta_n} * (column n of H2) * (row n of H1).
/// `n` is zero-based.
CMatrix channel_phase_derivative(const ChannelRealization& ch, const RisPhases& phases, int n);

/// JSON form: {"dims": {...}, "seed": u64|null, "H1": [[[re, im], ...], ...], "H2": ..., "G": ...}.
/// Matrices are nested row arrays. Doubles round-trip bit-exactly.
std::string channel_to_json(const ChannelRealization& ch, std::optional<std::uint64_t> seed = std::nullopt);

struct LoadedChannel {
    ChannelRealization channel;
    std::optional<std::uint64_t> seed;
};

LoadedChannel channel_from_json(const std::string& text);

}  // namespace risopt
