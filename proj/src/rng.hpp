// Deterministic RNG used for all sampling. std::uniform_int_distribution is
// implementation-defined, so draws are hand-rolled: xoshiro256++ seeded via
// splitmix64, rejection sampling for bounded draws. Results are identical
// across platforms and worker counts (each sample gets its own stream).
#pragma once

#include <cstdint>

#include "numeric.hpp"

namespace entdim {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next() {
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

    // Uniform in [0, bound), bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform big integer in [0, bound); used when column counts exceed 64 bits.
    BigInt below_big(const BigInt& bound) {
        if (auto small = to_u64(bound)) return BigInt(static_cast<unsigned long>(below(*small)));
        const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
        const std::size_t words = (bits + 63) / 64;
        for (;;) {
            BigInt r = 0;
            for (std::size_t w = 0; w < words; ++w) {
                r <<= 64;
                r += BigInt(static_cast<unsigned long>(next()));
            }
            r >>= words * 64 - bits;
            if (r < bound) return r;
        }
    }

    double unit() {  // [0,1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

}  // namespace entdim
