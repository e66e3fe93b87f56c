#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

namespace cprofile::engine {

/// A narrative scene. `reference_action` is present for benchmark scenes only.
struct Scene {
    std::string id;
    std::string context;
    std::string question;
    std::optional<std::string> reference_action;
    std::string artifact;
    std::string character;
    std::int64_t order_index = 0;
};

/// Throws std::invalid_argument when context is empty or order_index is negative.
void check_scene(const Scene& scene);

/// Scene JSONL schema: {id, artifact, character, order_index, context, question, reference_action}.
nlohmann::ordered_json to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

}  // namespace cprofile::engine
