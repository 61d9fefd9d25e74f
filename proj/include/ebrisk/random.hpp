#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "ebrisk/errors.hpp"
#include "ebrisk/prior.hpp"

namespace ebrisk {

// ============================================================================
// Deterministic random streams
// ============================================================================
//
// Sampling is chunked: sample index i lives in chunk i / kChunkSize, and each
// chunk runs its own mt19937_64 seeded by splitmix64-mixing (seed, chunk).
// The draw for a given (seed, index) therefore never depends on how many
// samples are requested in total, which keeps results bit-reproducible across
// sample counts and makes the streams embarrassingly parallel in principle.

inline constexpr std::size_t kChunkSize = 65536;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed;
    (void)detail::splitmix64(state);
    state ^= 0x517cc1b727220a95ULL * (stream + 1);
    std::uint64_t out = detail::splitmix64(state);
    // One extra scramble so adjacent streams share no affine structure.
    return detail::splitmix64(out);
}

// Uniform on [0, 1) built directly from the top 53 bits; the std library
// distributions are implementation-defined, which would break cross-platform
// reproducibility, so all transformations here are spelled out by hand.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller. Stateless on purpose: callers that want
// both outputs can use normal_pair; using only the cosine branch keeps the
// per-index draw count fixed, which the chunked scheme relies on.
inline double normal(std::mt19937_64& gen) {
    double u1 = uniform01(gen);
    const double u2 = uniform01(gen);
    if (u1 <= 0.0) u1 = 0x1.0p-53;  // guard the log against u1 == 0
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// One draw from the prior. Consumes a fixed number of variates per call
// (one uniform for component choice, one normal for mixtures; the discrete
// branch burns the normal too so both families advance streams identically).
inline double sample_theta(const DiscretePrior& g, std::mt19937_64& gen) {
    const double u = uniform01(gen);
    (void)normal(gen);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        acc += g.weights()[i];
        if (u < acc) return g.atoms()[i];
    }
    return g.atoms().back();
}

inline double sample_theta(const GaussianMixturePrior& g, std::mt19937_64& gen) {
    const double u = uniform01(gen);
    const double z = normal(gen);
    double acc = 0.0;
    std::size_t pick = g.size() - 1;
    for (std::size_t i = 0; i < g.size(); ++i) {
        acc += g.weights()[i];
        if (u < acc) {
            pick = i;
            break;
        }
    }
    return g.means()[pick] + std::sqrt(g.variances()[pick]) * z;
}

inline double sample_theta(const Prior& g, std::mt19937_64& gen) {
    return std::visit([&](const auto& p) { return sample_theta(p, gen); }, g);
}

// ============================================================================
// Compensated accumulation
// ============================================================================

// Neumaier-compensated running sum; cheap insurance against cancellation in
// long Monte Carlo accumulations.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace ebrisk
