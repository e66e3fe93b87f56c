#include "cprofile/responder/chat.hpp"

namespace cprofile::responder {

nlohmann::ordered_json to_json(const ChatTurn& t) {
    nlohmann::ordered_json j;
    j["user_text"] = t.user_text;
    j["response"] = t.response;
    j["triggered"] = nlohmann::ordered_json::array();
    for (const auto& s : t.triggered) j["triggered"].push_back(engine::to_json(s));
    j["trace"] = engine::to_json(t.trace);
    return j;
}

ChatSession::ChatSession(std::string id, std::string character, std::vector<dsl::Program> programs,
                         engine::ConditionOracle& oracle, llm::LlmContext llm, std::uint64_t seed, std::string opening_context)
    : id_(std::move(id)),
      character_(std::move(character)),
      programs_(std::move(programs)),
      oracle_(oracle),
      llm_(llm),
      seed_(seed),
      opening_(std::move(opening_context)) {}

engine::Scene ChatSession::scene_for(const std::string& user_text) const {
    std::lock_guard lock(mutex_);
    engine::Scene s;
    s.id = id_ + "-turn" + std::to_string(turns_.size() + 1);
    s.character = character_;
    std::string ctx = opening_.empty() ? "" : opening_ + "\n";
    const std::size_t first = turns_.size() > kWindow ? turns_.size() - kWindow : 0;
    for (std::size_t i = first; i < turns_.size(); ++i) {
        ctx += "User: " + turns_[i].user_text + "\n" + character_ + ": " + turns_[i].response + "\n";
    }
    ctx += "User: " + user_text;
    s.context = std::move(ctx);
    s.order_index = static_cast<std::int64_t>(turns_.size());
    return s;
}

ChatTurn ChatSession::turn(const std::string& user_text) {
    if (user_text.empty()) throw std::invalid_argument("user_text must be non-empty");
    const auto scene = scene_for(user_text);
    std::uint64_t index = 0;
    {
        std::lock_guard lock(mutex_);
        index = turns_.size();
    }
    auto grounding = ground(programs_, scene, oracle_, engine::RunSeed{seed_, scene.id, index});
    RespondConfig cfg;
    cfg.mode = Mode::Codified;
    cfg.guiding_question = false;
    auto rec = respond(scene, character_, grounding, cfg, llm_);
    ChatTurn t{user_text, rec.response, rec.triggered, rec.trace};
    std::lock_guard lock(mutex_);
    turns_.push_back(t);
    return t;
}

std::vector<ChatTurn> ChatSession::transcript() const {
    std::lock_guard lock(mutex_);
    return turns_;
}

}  // namespace cprofile::responder
