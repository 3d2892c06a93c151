#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace spmc {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

/// Seeded random stream: xoshiro256++ with splitmix64 state expansion.
///
/// Self-contained so that sequences are identical on every platform and
/// toolchain, which the reproducibility contract of the simulation harness
/// depends on. Substreams are derived from a master seed plus stable indices;
/// each worker owns its stream and streams are never shared.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    /// Substream keyed by up to three stable indices (experiment point,
    /// chunk, ...). Distinct keys give statistically independent streams.
    static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0) {
        std::uint64_t sm = seed;
        std::uint64_t k = detail::splitmix64(sm) ^ (a * 0xd1342543de82ef95ULL);
        k = k * 0xaf251af3b0f025b5ULL + b;
        k ^= k >> 32;
        k = k * 0x9e3779b97f4a7c15ULL + c;
        return Rng(k);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal draw (polar Box-Muller; second value cached).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * f;
        have_cached_ = true;
        return u * f;
    }

    double normal(double mean, double std) { return mean + std * normal(); }

    std::uint64_t uniform_index(std::uint64_t n) {
        // Modulo bias is < 2^-53 for the alphabet/index sizes used here.
        return next_u64() % n;
    }

private:
    std::uint64_t state_[4];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace spmc
