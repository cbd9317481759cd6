#pragma once

#include <cstdint>

namespace skewexp {

/// Deterministic splittable generator (splitmix64 core). Identical streams on
/// every platform for a given 64-bit seed, which is what makes the benchmark
/// and error CSVs reproducible.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 significant bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on [-1, 1].
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    /// Independent child stream; decorrelated from the parent's future output.
    SplitRng split() { return SplitRng(next_u64() ^ 0xa0761d6478bd642full); }

private:
    std::uint64_t state_;
};

/// Stable per-instance seed derivation for (suite, size, trial)-style keys.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    SplitRng r(seed ^ (a * 0x9e3779b97f4a7c15ull) ^ (b * 0xff51afd7ed558ccdull));
    r.next_u64();
    return r.next_u64();
}

} // namespace skewexp
