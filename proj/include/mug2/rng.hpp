#ifndef MUG2_RNG_HPP
#define MUG2_RNG_HPP

#include <cstdint>
#include <random>

namespace mug2 {

/// Seeded substream keyed by (master seed, index). Both the seeding and the
/// conversion to doubles are fully specified, so a given key produces the
/// same numbers on every conforming platform.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                          0x6d756732u};
        engine_.seed(seq);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }

    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Independent 64-bit seed for sub-task `index` of a run seeded with `seed` (splitmix64).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace mug2

#endif
