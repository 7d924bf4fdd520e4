#pragma once

#include <cstdint>

namespace toricount {

// Counter-based generator (splitmix64 over a keyed counter). Every draw is a
// pure function of (seed, stream, counter), so sample batches reduce to the
// same result for any worker count.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ 0x9e3779b97f4a7c15ull) ^ mix(stream * 0xbf58476d1ce4e5b9ull)) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

    // uniform in [0,1)
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [-1,1)
    double next_sym() { return 2.0 * next_unit() - 1.0; }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace toricount
