#pragma once

#include <cstdint>
#include <random>

namespace adpo {

// Deterministic RNG used everywhere. Doubles are produced from the raw
// 64-bit stream directly so results do not depend on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    int next_int(int n) {
        return static_cast<int>(next_double() * n) % n;
    }

    // Derive an independent stream; mixing via splitmix64 keeps derived
    // seeds decorrelated even for small inputs.
    static uint64_t mix(uint64_t a, uint64_t b) {
        uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace adpo
