#include "cprofile/llm/client.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <thread>

#include <spdlog/spdlog.h>

#include "cprofile/util/text.hpp"

namespace cprofile::llm {

namespace {

// Strips surrounding whitespace, quotes and trailing punctuation.
std::string normalize_token(std::string_view s) {
    s = trim(s);
    auto junk = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0 || std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!s.empty() && junk(s.front())) s.remove_prefix(1);
    while (!s.empty() && junk(s.back())) s.remove_suffix(1);
    return to_lower(s);
}

}  // namespace

std::optional<std::string> parse_label(const std::string& completion, const std::vector<std::string>& labels) {
    const std::string whole = normalize_token(completion);
    for (const auto& l : labels) {
        if (whole == to_lower(l)) return l;
    }
    const auto words = split_words(completion);
    if (words.empty()) return std::nullopt;
    const std::string first = normalize_token(words.front());
    for (const auto& l : labels) {
        if (first == to_lower(l)) return l;
    }
    return std::nullopt;
}

std::string extract_code_block(const std::string& completion) {
    const auto open = completion.find("```");
    if (open == std::string::npos) return completion;
    auto body_start = completion.find('\n', open);
    if (body_start == std::string::npos) return completion;
    ++body_start;
    const auto close = completion.find("```", body_start);
    return completion.substr(body_start, close == std::string::npos ? std::string::npos : close - body_start);
}

LlmClient::LlmClient(std::shared_ptr<Provider> provider, std::shared_ptr<ResponseCache> cache, RetryPolicy retry,
                     int max_concurrency)
    : provider_(std::move(provider)),
      cache_(cache ? std::move(cache) : std::make_shared<ResponseCache>()),
      retry_(retry),
      slots_(std::make_unique<std::counting_semaphore<1024>>(std::clamp(max_concurrency, 1, 1024))) {}

ProviderReply LlmClient::call_with_retries(const ProviderRequest& request) {
    auto delay = retry_.base_delay;
    std::string last_error;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        try {
            slots_->acquire();
            struct Release {
                std::counting_semaphore<1024>& s;
                ~Release() { s.release(); }
            } release{*slots_};
            return provider_->generate(request);
        } catch (const TransportError& e) {
            last_error = e.what();
        } catch (const MalformedResponse& e) {
            last_error = e.what();
        }
        spdlog::warn("llm call for '{}' failed (attempt {}/{}): {}", request.template_name, attempt, retry_.max_attempts, last_error);
        if (attempt < retry_.max_attempts && delay.count() > 0) {
            std::this_thread::sleep_for(delay);
            delay = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * retry_.multiplier));
        }
    }
    throw LlmUnavailable("llm call for '" + request.template_name + "' failed after " + std::to_string(retry_.max_attempts) +
                         " attempts: " + last_error);
}

LlmExchange LlmClient::complete(const PromptTemplate& tpl, const Bindings& bindings, const GenerationConfig& config) {
    LlmExchange ex;
    ex.template_name = tpl.name;
    ex.prompt = tpl.render(bindings);  // throws before any provider traffic

    const bool cacheable = config.temperature == 0.0;
    const std::string key = cacheable ? ResponseCache::key(config.model, ex.prompt, config.temperature, config.max_tokens) : "";
    const auto start = std::chrono::steady_clock::now();
    std::optional<ProviderReply> reply = cacheable ? cache_->find(key) : std::nullopt;
    if (reply) {
        ex.cache_hit = true;
        ++cache_hits_;
    } else {
        reply = call_with_retries(ProviderRequest{tpl.name, config.model, ex.prompt, config.temperature, config.max_tokens,
                                                  config.top_logprobs});
        ++forward_passes_;
        prompt_tokens_ += static_cast<std::size_t>(std::max(0, reply->prompt_tokens));
        completion_tokens_ += static_cast<std::size_t>(std::max(0, reply->completion_tokens));
        if (cacheable) cache_->store(key, *reply);
    }
    ex.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    ex.completion = reply->text;
    ex.prompt_tokens = std::max(0, reply->prompt_tokens);
    ex.completion_tokens = std::max(0, reply->completion_tokens);
    ex.first_token_logprobs = reply->first_token_logprobs;
    {
        std::lock_guard lock(log_mutex_);
        log_.push_back(ex);
    }
    return ex;
}

Classification LlmClient::classify(const PromptTemplate& tpl, const Bindings& bindings, const std::vector<std::string>& labels,
                                   const GenerationConfig& config) {
    if (labels.empty()) throw std::invalid_argument("classify needs at least one label");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            if (to_lower(labels[i]) == to_lower(labels[j])) throw std::invalid_argument("classify labels must be distinct");
        }
    }
    GenerationConfig cfg = config;
    if (!cfg.top_logprobs) cfg.top_logprobs = 20;

    Classification out;
    out.exchange = complete(tpl, bindings, cfg);
    if (!out.exchange.first_token_logprobs.empty()) {
        const double none = -std::numeric_limits<double>::infinity();
        for (const auto& l : labels) out.scores[l] = none;
        for (const auto& [token, lp] : out.exchange.first_token_logprobs) {
            const std::string t = normalize_token(token);
            for (const auto& l : labels) {
                const std::string first_word = normalize_token(split_words(l).empty() ? l : split_words(l).front());
                if (!t.empty() && t == first_word) out.scores[l] = std::max(out.scores[l], lp);
            }
        }
        const std::string* best = nullptr;
        for (const auto& l : labels) {
            if (out.scores[l] != none && (best == nullptr || out.scores[l] > out.scores[*best])) best = &l;
        }
        if (best != nullptr) {
            out.label = *best;
            out.from_logprobs = true;
            return out;
        }
        out.scores.clear();
    }
    auto parsed = parse_label(out.exchange.completion, labels);
    if (!parsed) throw Unparseable(out.exchange.completion);
    out.label = *parsed;
    return out;
}

UsageTotals LlmClient::usage() const {
    return UsageTotals{forward_passes_.load(), cache_hits_.load(), prompt_tokens_.load(), completion_tokens_.load()};
}

std::vector<LlmExchange> LlmClient::exchanges() const {
    std::lock_guard lock(log_mutex_);
    return log_;
}

}  // namespace cprofile::llm
