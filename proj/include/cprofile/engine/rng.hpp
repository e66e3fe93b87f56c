#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace cprofile::engine {

/// Identifies one execution's random stream.
struct RunSeed {
    std::uint64_t base_seed = 0;
    std::string scene_id;
    std::uint64_t run_index = 0;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// 64-bit FNV-1a over bytes.
constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/**
 * Seed of the substream for one segment:
 * mix(mix(mix(mix(base) ^ fnv(scene_id)) ^ run_index) ^ fnv(segment_id)).
 * Each component is folded in after a full avalanche, so streams keyed by
 * different segment ids are independent of each other and of segment order.
 */
std::uint64_t substream_seed(const RunSeed& seed, std::string_view segment_id);

/**
 * Deterministic random stream. Draws come from std::mt19937_64, whose output
 * sequence is fixed by the standard, and are converted without
 * implementation-defined distributions.
 */
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
    RandomStream(const RunSeed& seed, std::string_view segment_id) : engine_(substream_seed(seed, segment_id)) {}

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform index in [0, k); k must be > 0.
    std::size_t index(std::size_t k) {
        const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(k));
        return i < k ? i : k - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace cprofile::engine
