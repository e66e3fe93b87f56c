#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "cprofile/llm/provider.hpp"

namespace cprofile::llm {

/**
 * Content-addressed completion cache. Entries live in memory and, when a
 * directory is configured, as `<dir>/<h0h1>/<hash>.json`. Single write wins.
 */
class ResponseCache {
public:
    ResponseCache() = default;
    explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    static std::string key(const std::string& model, const std::string& prompt, double temperature, int max_tokens);

    std::optional<ProviderReply> find(const std::string& key);
    void store(const std::string& key, const ProviderReply& reply);
    void clear();

private:
    std::filesystem::path path_for(const std::string& key) const;

    std::mutex mutex_;
    std::map<std::string, ProviderReply> memory_;
    std::filesystem::path dir_;
};

}  // namespace cprofile::llm
