#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace bhpc {

/// SplitMix64 step, used to decorrelate (seed, stream) pairs before seeding
/// the engine. Distinct streams share no statistically visible structure.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent, reproducible random stream addressed by (seed, stream id).
/// All floating-point mappings are implemented here rather than with
/// std::*_distribution so that sequences are identical across standard
/// library implementations.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64(s);
        s ^= stream * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL;
        std::uint64_t b = splitmix64(s);
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        engine_.seed(seq);
    }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform phase on [0, 2*pi).
    double phase() { return 2.0 * M_PI * uniform01(); }

    /// Standard normal via Box-Muller (polar-free form; rejects u1 == 0).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    /// Standard complex normal: Re and Im each N(0, 1/2), so E|z|^2 = 1.
    std::complex<double> complex_normal() {
        const double scale = std::sqrt(0.5);
        double re = normal();
        double im = normal();
        return {scale * re, scale * im};
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace bhpc
