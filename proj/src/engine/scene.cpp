#include "cprofile/engine/scene.hpp"

#include <stdexcept>

namespace cprofile::engine {

void check_scene(const Scene& scene) {
    if (scene.context.empty()) throw std::invalid_argument("scene " + scene.id + " has an empty context");
    if (scene.order_index < 0) throw std::invalid_argument("scene " + scene.id + " has a negative order_index");
}

nlohmann::ordered_json to_json(const Scene& scene) {
    nlohmann::ordered_json j;
    j["id"] = scene.id;
    j["artifact"] = scene.artifact;
    j["character"] = scene.character;
    j["order_index"] = scene.order_index;
    j["context"] = scene.context;
    j["question"] = scene.question;
    if (scene.reference_action) {
        j["reference_action"] = *scene.reference_action;
    } else {
        j["reference_action"] = nullptr;
    }
    return j;
}

Scene scene_from_json(const nlohmann::json& j) {
    Scene s;
    s.id = j.at("id").get<std::string>();
    s.artifact = j.value("artifact", std::string{});
    s.character = j.value("character", std::string{});
    s.order_index = j.value("order_index", std::int64_t{0});
    s.context = j.at("context").get<std::string>();
    s.question = j.value("question", std::string{});
    if (auto it = j.find("reference_action"); it != j.end() && !it->is_null()) s.reference_action = it->get<std::string>();
    check_scene(s);
    return s;
}

}  // namespace cprofile::engine
