#pragma once

#include "wrr/common.hpp"

#include <cstdint>

namespace wrr {

/// Name of the generator recorded in output metadata.
inline constexpr const char* kRngName = "xoshiro256++/box-muller";

/// splitmix64 step; used for seeding and stream derivation.
uint64_t splitmix64(uint64_t& state);

/// xoshiro256++ with explicit seeding via splitmix64 expansion.
/// Deterministic across platforms: no libstdc++ distributions are used.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(uint64_t seed);

    uint64_t next_u64();

    /// Uniform in [0,1) with 53-bit resolution.
    double next_double();

    /// Standard normal via Box-Muller (trigonometric form). Pairs are cached.
    double next_gaussian();

    /// Vector of i.i.d. standard normals.
    Vector gaussian_vector(Eigen::Index n);

private:
    uint64_t s_[4];
    bool have_cached_ = false;
    double cached_ = 0.0;
};

/// Derives an independent substream from a master seed and a purpose tag.
/// Streams for different tags never share state; the same (seed, tag) pair
/// always yields the same stream.
Xoshiro256pp derive_stream(uint64_t seed, uint64_t purpose_tag);

/// Purpose tags for the simulator and harness streams.
namespace stream {
inline constexpr uint64_t kNoise = 0x6e6f697365ULL;      // "noise"
inline constexpr uint64_t kShift = 0x7368696674ULL;      // "shift"
inline constexpr uint64_t kSplit = 0x73706c6974ULL;      // "split"
inline constexpr uint64_t kMonteCarlo = 0x6d63ULL;       // "mc"
inline constexpr uint64_t kPerturb = 0x70657274ULL;      // "pert"
}  // namespace stream

/// Symmetric PSD square root A with A*A^T = S (eigenvalue clamping at 0).
Matrix psd_sqrt(const Matrix& sym);

/// Draws n samples from N(mean, cov); one row per sample.
/// cov may be rank-deficient PSD.
Matrix sample_gaussian(const Vector& mean, const Matrix& cov_sqrt, Eigen::Index n,
                       Xoshiro256pp& rng);

}  // namespace wrr
