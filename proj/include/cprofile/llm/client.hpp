#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <vector>

#include "cprofile/llm/cache.hpp"
#include "cprofile/llm/provider.hpp"
#include "cprofile/llm/template.hpp"

namespace cprofile::llm {

struct GenerationConfig {
    std::string model;
    double temperature = 0.0;
    int max_tokens = 512;
    std::optional<int> top_logprobs;
};

/// Stochastic-response runs keep temperature at or below this.
inline constexpr double kMaxStochasticTemperature = 0.7;

struct LlmExchange {
    std::string template_name;
    std::string prompt;
    std::string completion;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    double latency_ms = 0.0;
    bool cache_hit = false;
    std::vector<std::pair<std::string, double>> first_token_logprobs;
};

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_delay{500};
    double multiplier = 2.0;
};

/// Retries were exhausted on transport, rate-limit or malformed-response failures.
class LlmUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A completion matched none of the labels.
class Unparseable : public std::runtime_error {
public:
    explicit Unparseable(std::string completion)
        : std::runtime_error("completion matches no label: " + completion), completion_(std::move(completion)) {}
    const std::string& completion() const { return completion_; }

private:
    std::string completion_;
};

struct Classification {
    std::string label;
    std::map<std::string, double> scores;  // per label; empty when decided by text parsing
    bool from_logprobs = false;
    LlmExchange exchange;
};

struct UsageTotals {
    std::size_t forward_passes = 0;  // provider calls that produced a completion
    std::size_t cache_hits = 0;
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
};

/**
 * Provider-agnostic completion client. Temperature-0 calls are cached by
 * (model, rendered prompt, temperature, max_tokens); per-client concurrency is
 * bounded by `max_concurrency`.
 */
class LlmClient {
public:
    explicit LlmClient(std::shared_ptr<Provider> provider, std::shared_ptr<ResponseCache> cache = nullptr,
                       RetryPolicy retry = {}, int max_concurrency = 8);

    LlmExchange complete(const PromptTemplate& tpl, const Bindings& bindings, const GenerationConfig& config);

    /// Argmax over first-token log-scores when available, else case-insensitive label parsing.
    Classification classify(const PromptTemplate& tpl, const Bindings& bindings, const std::vector<std::string>& labels,
                            const GenerationConfig& config);

    UsageTotals usage() const;
    std::vector<LlmExchange> exchanges() const;
    ResponseCache& cache() { return *cache_; }

private:
    ProviderReply call_with_retries(const ProviderRequest& request);

    std::shared_ptr<Provider> provider_;
    std::shared_ptr<ResponseCache> cache_;
    RetryPolicy retry_;
    std::unique_ptr<std::counting_semaphore<1024>> slots_;
    mutable std::mutex log_mutex_;
    std::vector<LlmExchange> log_;
    std::atomic<std::size_t> forward_passes_{0};
    std::atomic<std::size_t> cache_hits_{0};
    std::atomic<std::size_t> prompt_tokens_{0};
    std::atomic<std::size_t> completion_tokens_{0};
};

/// Label chosen by exact (case-insensitive) match of the trimmed completion or of its first word.
std::optional<std::string> parse_label(const std::string& completion, const std::vector<std::string>& labels);

/// Extracts the first ``` fenced block; returns the whole text when there is none.
std::string extract_code_block(const std::string& completion);

/// A client, its templates and the generation settings a pipeline stage uses.
struct LlmContext {
    LlmClient& client;
    const TemplateLibrary& templates;
    GenerationConfig config;
};

}  // namespace cprofile::llm
