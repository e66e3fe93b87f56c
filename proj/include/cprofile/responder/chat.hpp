#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <vector>

#include "cprofile/responder/respond.hpp"

namespace cprofile::responder {

struct ChatTurn {
    std::string user_text;
    std::string response;
    std::vector<engine::TriggeredStatement> triggered;
    engine::Trace trace;
};

nlohmann::ordered_json to_json(const ChatTurn& t);

/**
 * Live role-play against a codified profile. Each turn is a scene built from
 * the last 20 turns of transcript plus the new user text; no guiding question.
 */
class ChatSession {
public:
    static constexpr std::size_t kWindow = 20;

    ChatSession(std::string id, std::string character, std::vector<dsl::Program> programs, engine::ConditionOracle& oracle,
                llm::LlmContext llm, std::uint64_t seed, std::string opening_context = {});

    ChatTurn turn(const std::string& user_text);

    const std::string& id() const { return id_; }
    const std::string& character() const { return character_; }
    /// Every turn so far, including those outside the prompt window.
    std::vector<ChatTurn> transcript() const;
    /// The scene the next turn would see, given `user_text`.
    engine::Scene scene_for(const std::string& user_text) const;

private:
    std::string id_;
    std::string character_;
    std::vector<dsl::Program> programs_;
    engine::ConditionOracle& oracle_;
    llm::LlmContext llm_;
    std::uint64_t seed_;
    std::string opening_;
    mutable std::mutex mutex_;
    std::vector<ChatTurn> turns_;
};

}  // namespace cprofile::responder
