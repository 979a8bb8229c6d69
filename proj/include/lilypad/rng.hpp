#pragma once

#include <array>
#include <cmath>
#include <cstdint>

// Deterministic, splittable random number generation. Every stochastic run is
// keyed by a (seed, stream) pair so replicates can be fanned out across threads
// and still reproduce bit-for-bit in any execution order.

namespace lilypad {

// Weyl-sequence generator used for seeding and stream derivation.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t s) : state(s) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// Stream id for replicate `index` under master `seed`: mixes both words so
// nearby seeds or indices do not produce correlated states.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mix(seed ^ (0x632be59bd9b4e019ULL + index * 0x9e3779b97f4a7c15ULL));
    std::uint64_t a = mix.next();
    std::uint64_t b = mix.next();
    return a ^ (b >> 1);
}

// xoshiro256** (Blackman/Vigna), state expanded from a 64-bit stream id via
// splitmix64 as its authors recommend.
class Rng {
  public:
    explicit Rng(std::uint64_t stream_id) {
        SplitMix64 mix(stream_id);
        for (auto& w : s_) w = mix.next();
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on (0, 1]: 53-bit mantissa, never returns 0 so logs and negative
    // powers are always finite.
    double uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Exponential waiting time with the given rate.
    double exponential(double rate) { return -std::log(uniform01()) / rate; }

    // Integer uniform on [0, n). n is tiny here (site picks, 2d directions), so
    // the multiply-shift trick with a rejection-free bias of < 2^-53 is fine.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> s_{};
};

// Pareto(alpha) via inverse CDF: P(xi > x) = x^-alpha for x >= 1, so
// xi = U^(-1/alpha) with U uniform on (0, 1].
inline double pareto_from_uniform(double u, double alpha) {
    return std::pow(u, -1.0 / alpha);
}

// Compensated accumulator for long event-rate sums.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// FNV-1a, used for config hashes in run manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace lilypad
