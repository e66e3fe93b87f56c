#include <cstdlib>

#include "cprofile/llm/provider.hpp"
#include "httplib.h"
#include "json.hpp"

namespace cprofile::llm {

std::pair<std::string, std::string> split_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, ""};
    std::string path = url.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {url.substr(0, path_start), path};
}

HttpProvider::HttpProvider(std::string base_url, std::string api_key, int timeout_seconds)
    : api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {
    std::tie(scheme_host_port_, path_prefix_) = split_base_url(base_url);
}

std::shared_ptr<HttpProvider> HttpProvider::from_env() {
    const char* base = std::getenv("CP_LLM_BASE_URL");
    if (base == nullptr || *base == '\0') throw std::runtime_error("CP_LLM_BASE_URL is not set");
    const char* key = std::getenv("CP_LLM_API_KEY");
    return std::make_shared<HttpProvider>(base, key == nullptr ? "" : key);
}

ProviderReply HttpProvider::parse_response(const std::string& body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedResponse(std::string("response is not JSON: ") + e.what());
    }
    try {
        const auto& choice = j.at("choices").at(0);
        ProviderReply reply;
        const auto& content = choice.at("message").at("content");
        reply.text = content.is_null() ? "" : content.get<std::string>();
        if (j.contains("usage") && j["usage"].is_object()) {
            reply.prompt_tokens = j["usage"].value("prompt_tokens", 0);
            reply.completion_tokens = j["usage"].value("completion_tokens", 0);
        }
        if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
            const auto& lp = choice["logprobs"];
            if (lp.contains("content") && lp["content"].is_array() && !lp["content"].empty()) {
                const auto& first = lp["content"][0];
                for (const auto& alt : first.value("top_logprobs", nlohmann::json::array())) {
                    reply.first_token_logprobs.emplace_back(alt.at("token").get<std::string>(), alt.at("logprob").get<double>());
                }
                if (reply.first_token_logprobs.empty() && first.contains("token")) {
                    reply.first_token_logprobs.emplace_back(first.at("token").get<std::string>(), first.at("logprob").get<double>());
                }
            }
        }
        return reply;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedResponse(std::string("unexpected chat-completions shape: ") + e.what());
    }
}

ProviderReply HttpProvider::generate(const ProviderRequest& request) {
    nlohmann::json body = {
        {"model", request.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
    if (request.top_logprobs) {
        body["logprobs"] = true;
        body["top_logprobs"] = *request.top_logprobs;
    }
    httplib::Client cli(scheme_host_port_);
    cli.set_connection_timeout(timeout_seconds_);
    cli.set_read_timeout(timeout_seconds_);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = cli.Post(path_prefix_ + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw TransportError("chat-completions request failed: " + httplib::to_string(res.error()));
    if (res->status == 429) throw RateLimited("provider rate limit (429)");
    if (res->status >= 500) throw TransportError("provider error " + std::to_string(res->status));
    if (res->status != 200) throw MalformedResponse("provider returned HTTP " + std::to_string(res->status) + ": " + res->body);
    return parse_response(res->body);
}

}  // namespace cprofile::llm
