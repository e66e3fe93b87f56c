#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cprofile::llm {

struct ProviderRequest {
    std::string template_name;  // informational; lets scripted providers route by template
    std::string model;
    std::string prompt;
    double temperature = 0.0;
    int max_tokens = 512;
    std::optional<int> top_logprobs;
};

struct ProviderReply {
    std::string text;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    /// Candidate first tokens with their log-probabilities; empty when the provider exposes none.
    std::vector<std::pair<std::string, double>> first_token_logprobs;
};

/// Network-level failure; retried with backoff.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RateLimited : public TransportError {
public:
    using TransportError::TransportError;
};

/// The provider answered with something that is not a completion.
class MalformedResponse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual ProviderReply generate(const ProviderRequest& request) = 0;
};

/**
 * In-process scripted provider. Rules are tried in insertion order; the first
 * whose template filter and substrings all match answers. A rule with several
 * replies returns them in sequence and then repeats the last one.
 */
class MockProvider : public Provider {
public:
    struct Rule {
        std::string template_name;           // empty matches any template
        std::vector<std::string> contains;   // all must occur in the prompt
        std::vector<std::string> replies;
        std::vector<std::pair<std::string, double>> logprobs;
        int fail_first = 0;                  // throw TransportError for the first n matches
    };
    using Handler = std::function<std::optional<ProviderReply>(const ProviderRequest&)>;

    MockProvider() = default;

    /// Script format: {"echo": bool, "default": str, "rules": [{template, contains, reply|replies, logprobs, fail_first}]}.
    static std::shared_ptr<MockProvider> from_json_file(const std::filesystem::path& path);

    MockProvider& add_rule(Rule rule);
    MockProvider& on(std::string template_name, std::vector<std::string> contains, std::vector<std::string> replies);
    MockProvider& add_handler(Handler handler);
    MockProvider& set_echo(bool echo);
    MockProvider& set_default(std::string reply);

    ProviderReply generate(const ProviderRequest& request) override;

    int calls() const { return calls_.load(); }
    std::vector<ProviderRequest> requests() const;
    std::vector<ProviderRequest> requests_for(const std::string& template_name) const;

private:
    struct Entry {
        Rule rule;
        Handler handler;
        int hits = 0;
    };

    mutable std::mutex mutex_;
    std::vector<Entry> entries_;
    bool echo_ = false;
    std::optional<std::string> default_;
    std::vector<ProviderRequest> log_;
    std::atomic<int> calls_{0};
};

/// OpenAI-compatible chat-completions endpoint.
class HttpProvider : public Provider {
public:
    HttpProvider(std::string base_url, std::string api_key, int timeout_seconds = 120);

    /// Reads CP_LLM_BASE_URL and CP_LLM_API_KEY; throws std::runtime_error when the base URL is unset.
    static std::shared_ptr<HttpProvider> from_env();

    ProviderReply generate(const ProviderRequest& request) override;

    /// Parses a chat-completions response body. Throws MalformedResponse.
    static ProviderReply parse_response(const std::string& body);

private:
    std::string scheme_host_port_;
    std::string path_prefix_;
    std::string api_key_;
    int timeout_seconds_;
};

/// Splits "https://host:port/v1" into {"https://host:port", "/v1"}.
std::pair<std::string, std::string> split_base_url(const std::string& url);

}  // namespace cprofile::llm
