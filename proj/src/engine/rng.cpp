#include "cprofile/engine/rng.hpp"

namespace cprofile::engine {

std::uint64_t substream_seed(const RunSeed& seed, std::string_view segment_id) {
    std::uint64_t h = mix64(seed.base_seed);
    h = mix64(h ^ fnv1a64(seed.scene_id));
    h = mix64(h ^ seed.run_index);
    h = mix64(h ^ fnv1a64(segment_id));
    return h;
}

}  // namespace cprofile::engine
