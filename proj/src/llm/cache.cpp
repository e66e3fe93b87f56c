#include "cprofile/llm/cache.hpp"

#include <cstdio>
#include <algorithm>

#include "cprofile/util/hash.hpp"
#include "cprofile/util/text.hpp"
#include "json.hpp"

namespace cprofile::llm {

std::string ResponseCache::key(const std::string& model, const std::string& prompt, double temperature, int max_tokens) {
    char temp[32];
    std::snprintf(temp, sizeof temp, "%.17g", temperature);
    std::string material = model;
    material += '\x1f';
    material += prompt;
    material += '\x1f';
    material += temp;
    material += '\x1f';
    material += std::to_string(max_tokens);
    return sha256_hex(material);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
    return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<ProviderReply> ResponseCache::find(const std::string& key) {
    std::lock_guard lock(mutex_);
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
    if (dir_.empty()) return std::nullopt;
    const auto path = path_for(key);
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
        const auto j = nlohmann::json::parse(read_text_file(path));
        ProviderReply r;
        r.text = j.at("completion").get<std::string>();
        r.prompt_tokens = j.value("prompt_tokens", 0);
        r.completion_tokens = j.value("completion_tokens", 0);
        for (const auto& e : j.value("first_token_logprobs", nlohmann::json::array())) {
            r.first_token_logprobs.emplace_back(e.at(0).get<std::string>(), e.at(1).get<double>());
        }
        memory_.emplace(key, r);
        return r;
    } catch (const std::exception&) {
        return std::nullopt;  // unreadable entry behaves as a miss
    }
}

void ResponseCache::store(const std::string& key, const ProviderReply& reply) {
    std::lock_guard lock(mutex_);
    if (!memory_.emplace(key, reply).second) return;
    if (dir_.empty()) return;
    const auto path = path_for(key);
    if (std::filesystem::exists(path)) return;
    nlohmann::ordered_json j;
    j["key"] = key;
    j["completion"] = reply.text;
    j["prompt_tokens"] = reply.prompt_tokens;
    j["completion_tokens"] = reply.completion_tokens;
    j["first_token_logprobs"] = nlohmann::json::array();
    for (const auto& [tok, lp] : reply.first_token_logprobs) j["first_token_logprobs"].push_back({tok, lp});
    write_text_file(path, j.dump(2));
}

void ResponseCache::clear() {
    std::lock_guard lock(mutex_);
    memory_.clear();
    if (!dir_.empty()) std::filesystem::remove_all(dir_);
}

}  // namespace cprofile::llm
