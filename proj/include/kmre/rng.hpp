#pragma once
// Seedable, splittable PRNG used by every stochastic component.
// xoshiro256++ core, state initialized through SplitMix64 so that any
// 64-bit seed gives a well-mixed state.  Streams derived with derive()
// are independent for practical purposes and reproducible from
// (seed, stream) alone, which is what the report files record.

#include <cstdint>
#include <cmath>

namespace kmre {

inline uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed = 0x5eed) : seed_(seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    // Independent child stream; (seed, stream_id) fully determines it.
    Rng derive(uint64_t stream_id) const {
        uint64_t sm = seed_ ^ (0x9e3779b97f4a7c15ull * (stream_id + 1));
        return Rng(splitmix64(sm));
    }

    uint64_t seed() const { return seed_; }

    uint64_t next() {
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

    // Uniform in (0,1]; never returns 0 so -log(u01()) is always finite.
    double u01() { return double((next() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate = 1.0) { return -std::log(u01()) / rate; }

    // Unbiased uniform integer in [0, n), n >= 1 (Lemire with rejection).
    uint64_t below(uint64_t n) {
        uint64_t x = next();
        __uint128_t m = (__uint128_t)x * n;
        uint64_t l = (uint64_t)m;
        if (l < n) {
            uint64_t t = -n % n;
            while (l < t) {
                x = next();
                m = (__uint128_t)x * n;
                l = (uint64_t)m;
            }
        }
        return (uint64_t)(m >> 64);
    }

    bool coin() { return next() >> 63; }

    // UniformRandomBitGenerator interface
    using result_type = uint64_t;
    static constexpr uint64_t min() { return 0; }
    static constexpr uint64_t max() { return ~0ull; }
    uint64_t operator()() { return next(); }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
    uint64_t seed_;
};

} // namespace kmre
