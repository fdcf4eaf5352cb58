#include "wrr/rng.hpp"

#include <cmath>

namespace wrr {

namespace {
inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
constexpr double kInv2_53 = 1.0 / 9007199254740992.0;  // 2^-53
}  // namespace

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Xoshiro256pp::Xoshiro256pp(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

uint64_t Xoshiro256pp::next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256pp::next_double() {
    return static_cast<double>(next_u64() >> 11) * kInv2_53;
}

double Xoshiro256pp::next_gaussian() {
    if (have_cached_) {
        have_cached_ = false;
        return cached_;
    }
    // Box-Muller; u1 bounded away from 0 so log stays finite.
    double u1 = next_double();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
}

Vector Xoshiro256pp::gaussian_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = next_gaussian();
    return v;
}

Xoshiro256pp derive_stream(uint64_t seed, uint64_t purpose_tag) {
    uint64_t sm = seed;
    const uint64_t a = splitmix64(sm);
    sm = a ^ purpose_tag;
    const uint64_t derived = splitmix64(sm);
    return Xoshiro256pp(derived);
}

Matrix psd_sqrt(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.transpose()));
    if (es.info() != Eigen::Success) throw NumericFailure("psd_sqrt: eigendecomposition failed");
    Vector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

Matrix sample_gaussian(const Vector& mean, const Matrix& cov_sqrt, Eigen::Index n,
                       Xoshiro256pp& rng) {
    const Eigen::Index d = mean.size();
    Matrix out(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.row(i) = (mean + cov_sqrt * rng.gaussian_vector(d)).transpose();
    }
    return out;
}

}  // namespace wrr
