#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sepopt {

// splitmix64 finalizer (Stafford mix13).
inline std::uint64_t mix_bits(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Purpose tags keep independent sampling streams from colliding on the
// same master seed.
enum class StreamPurpose : std::uint64_t {
    train_states = 1,
    backup_noise = 2,
    pd_states = 3,
    pd_noise = 4,
    scenario = 5,
    episode_seed = 6,
    episode_noise = 7,
    slice = 8,
};

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t k = mix_bits(seed + 0x9E3779B97F4A7C15ull);
    k = mix_bits(k ^ (a + 0xD1B54A32D192ED03ull));
    k = mix_bits(k ^ (b + 0x8CB92BA72F3D8DD7ull));
    k = mix_bits(k ^ (c + 0xA24BAED4963EE407ull));
    return k;
}

inline std::uint64_t stream_key(std::uint64_t seed, StreamPurpose p,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
    return stream_key(seed, static_cast<std::uint64_t>(p), b, c);
}

// Counter-based generator: the n-th output is a pure function of (key, n),
// so identically keyed streams replay bitwise regardless of thread count or
// evaluation order. Core is splitmix64 seeded at `key`.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        ++n_draws_;
        state_ += 0x9E3779B97F4A7C15ull;
        return mix_bits(state_);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_uniform(double lo, double hi) {
        return lo + next_uniform() * (hi - lo);
    }

    // Unbiased-enough integer in [0, n) via 128-bit multiply.
    std::uint64_t next_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    bool next_bool() { return (next_u64() & 1u) != 0; }

    // Standard normal, Box-Muller cosine branch. Consumes exactly two
    // uniforms per call; u1 is shifted into (0, 1] to keep log finite.
    double next_normal() {
        const double u1 =
            static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double next_normal(double sigma) { return sigma * next_normal(); }

    // Number of raw 64-bit draws consumed; used by stream-accounting tests.
    std::uint64_t draw_count() const { return n_draws_; }

private:
    std::uint64_t state_;
    std::uint64_t n_draws_ = 0;
};

}  // namespace sepopt
