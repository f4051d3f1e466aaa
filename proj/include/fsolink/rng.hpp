#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace fsolink {

// splitmix64 finalizer (Vigna 2015). Used for seed mixing and stream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// xoshiro256++ stream seeded by splitmix64 expansion of a 64-bit key.
// Every Monte Carlo consumer owns its own Rng; parallel reproducibility
// comes from deriving per-(grid point, trial) keys from one master seed,
// never from sharing a stream between threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& w : state_) {
            z += kGolden;
            w = mix64(z);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1); never returns 0, safe under log().
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Multiply-shift; bias is O(n / 2^64).
    int below(int n) {
        return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                                 static_cast<unsigned __int128>(n)) >> 64);
    }

    // Standard normal via Box-Muller.
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        return r * std::cos(2.0 * M_PI * uniform());
    }

    // Circularly symmetric complex Gaussian with total variance `variance`
    // (variance/2 per real component).
    std::complex<double> complex_normal(double variance) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1) * variance);
        return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    }

    // Gamma(shape, scale 1) by Marsaglia & Tsang (2000), exact rejection.
    // Shapes below 1 use the boost G(a) = G(a+1) U^(1/a).
    double gamma(double shape) {
        if (shape < 1.0)
            return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * (x * x) * (x * x))
                return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return d * v;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_;
};

// Deterministic substream key for a (up to) three-level index path under one
// master seed. Distinct paths give statistically independent streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t k = mix64(master + kGolden);
    k = mix64(k ^ (a + kGolden));
    k = mix64(k ^ (b + kGolden));
    k = mix64(k ^ (c + kGolden));
    return k;
}

inline Rng derive_stream(std::uint64_t master, std::uint64_t a,
                         std::uint64_t b = 0, std::uint64_t c = 0) {
    return Rng(derive_seed(master, a, b, c));
}

}  // namespace fsolink
