#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "cprofile/engine/oracle.hpp"
#include "cprofile/llm/client.hpp"

namespace cprofile::cli {

struct ServeContext {
    std::filesystem::path profiles;     // version store root
    std::filesystem::path transcripts;  // closed sessions are dumped here as JSONL
    engine::ConditionOracle& oracle;
    llm::LlmContext llm;
    std::uint64_t seed = 0;
};

/**
 * JSON API for the web console:
 *   POST   /sessions                      {character, version?} -> {session_id}
 *   POST   /sessions/{id}/turns           {user_text} -> {response, triggered, trace}
 *   GET    /sessions/{id}                 -> transcript
 *   DELETE /sessions/{id}                 -> dumps the transcript and closes
 *   GET    /profiles                      -> characters with their head version
 *   GET    /profiles/{c}/versions         -> versions and revisions
 *   GET    /profiles/{c}/versions/{n}     -> sources of version n and its revision
 *   POST   /eval/preview                  {character, scene} -> {response, triggered, trace}
 * Sessions live in memory and are confined to their own engine state.
 */
class ApiServer {
public:
    explicit ApiServer(ServeContext ctx);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds to `port` (0 picks a free one) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind.
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cprofile::cli
