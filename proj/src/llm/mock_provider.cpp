#include <algorithm>
#include <stdexcept>

#include "cprofile/llm/provider.hpp"
#include "cprofile/util/text.hpp"
#include "json.hpp"

namespace cprofile::llm {

std::shared_ptr<MockProvider> MockProvider::from_json_file(const std::filesystem::path& path) {
    const auto j = nlohmann::json::parse(read_text_file(path));
    auto mock = std::make_shared<MockProvider>();
    mock->set_echo(j.value("echo", false));
    if (j.contains("default")) mock->set_default(j.at("default").get<std::string>());
    for (const auto& r : j.value("rules", nlohmann::json::array())) {
        Rule rule;
        rule.template_name = r.value("template", std::string{});
        rule.contains = r.value("contains", std::vector<std::string>{});
        if (r.contains("reply")) rule.replies.push_back(r.at("reply").get<std::string>());
        for (const auto& s : r.value("replies", std::vector<std::string>{})) rule.replies.push_back(s);
        if (r.contains("logprobs")) {
            for (const auto& [tok, lp] : r.at("logprobs").items()) rule.logprobs.emplace_back(tok, lp.get<double>());
        }
        rule.fail_first = r.value("fail_first", 0);
        if (rule.replies.empty() && rule.logprobs.empty()) {
            throw std::invalid_argument("mock rule without reply in " + path.string());
        }
        mock->add_rule(std::move(rule));
    }
    return mock;
}

MockProvider& MockProvider::add_rule(Rule rule) {
    std::lock_guard lock(mutex_);
    entries_.push_back(Entry{std::move(rule), nullptr, 0});
    return *this;
}

MockProvider& MockProvider::on(std::string template_name, std::vector<std::string> contains, std::vector<std::string> replies) {
    return add_rule(Rule{std::move(template_name), std::move(contains), std::move(replies), {}, 0});
}

MockProvider& MockProvider::add_handler(Handler handler) {
    std::lock_guard lock(mutex_);
    entries_.push_back(Entry{{}, std::move(handler), 0});
    return *this;
}

MockProvider& MockProvider::set_echo(bool echo) {
    std::lock_guard lock(mutex_);
    echo_ = echo;
    return *this;
}

MockProvider& MockProvider::set_default(std::string reply) {
    std::lock_guard lock(mutex_);
    default_ = std::move(reply);
    return *this;
}

ProviderReply MockProvider::generate(const ProviderRequest& request) {
    std::lock_guard lock(mutex_);
    ++calls_;
    log_.push_back(request);
    const int prompt_tokens = static_cast<int>(split_words(request.prompt).size());
    auto reply_with = [&](std::string text, std::vector<std::pair<std::string, double>> logprobs = {}) {
        ProviderReply r;
        r.completion_tokens = static_cast<int>(split_words(text).size());
        r.text = std::move(text);
        r.prompt_tokens = prompt_tokens;
        r.first_token_logprobs = std::move(logprobs);
        return r;
    };
    for (auto& entry : entries_) {
        if (entry.handler) {
            if (auto r = entry.handler(request)) {
                if (r->prompt_tokens == 0) r->prompt_tokens = prompt_tokens;
                return *r;
            }
            continue;
        }
        const auto& rule = entry.rule;
        if (!rule.template_name.empty() && rule.template_name != request.template_name) continue;
        bool match = true;
        for (const auto& needle : rule.contains) {
            if (request.prompt.find(needle) == std::string::npos) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        const int hit = entry.hits++;
        if (hit < rule.fail_first) throw TransportError("scripted transport failure");
        const int served = hit - rule.fail_first;
        std::string text;
        if (!rule.replies.empty()) {
            text = rule.replies[std::min<std::size_t>(static_cast<std::size_t>(served), rule.replies.size() - 1)];
        }
        return reply_with(std::move(text), rule.logprobs);
    }
    if (echo_) return reply_with(request.prompt);
    if (default_) return reply_with(*default_);
    throw MalformedResponse("mock provider has no rule for template '" + request.template_name + "'");
}

std::vector<ProviderRequest> MockProvider::requests() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::vector<ProviderRequest> MockProvider::requests_for(const std::string& template_name) const {
    std::lock_guard lock(mutex_);
    std::vector<ProviderRequest> out;
    for (const auto& r : log_) {
        if (r.template_name == template_name) out.push_back(r);
    }
    return out;
}

}  // namespace cprofile::llm
