#pragma once

#include <cstdint>

namespace conjlab {

// splitmix64. Small, fast, and good enough for sampling shapes and probe
// starts. Streams are derived by hashing (seed, index) so a result never
// depends on which thread ran which restart.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

// Deterministic stream id for (seed, index) pairs.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (index * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL));
    g.next();
    return g.next();
}

inline std::uint64_t hash_accumulate(std::uint64_t h, std::uint64_t v) {
    SplitMix64 g(h ^ (v + 0x9e3779b97f4a7c15ULL));
    return g.next();
}

}  // namespace conjlab
