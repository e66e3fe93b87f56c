#include <cstdlib>
#include <thread>

#include <spdlog/spdlog.h>

#include "cprofile/oracles/condition.hpp"
#include "cprofile/util/text.hpp"
#include "httplib.h"

namespace cprofile::oracles {

using engine::ConditionVerdict;
using engine::Tri;

RemoteConditionOracle::RemoteConditionOracle(std::string url, int timeout_seconds, llm::RetryPolicy retry)
    : timeout_seconds_(timeout_seconds), retry_(retry) {
    std::tie(scheme_host_port_, path_) = llm::split_base_url(url);
    if (path_.empty()) path_ = "/";
}

RemoteConditionOracle RemoteConditionOracle::from_env() {
    const char* url = std::getenv("CP_REMOTE_CHECKER_URL");
    if (url == nullptr || *url == '\0') throw std::runtime_error("CP_REMOTE_CHECKER_URL is not set");
    return RemoteConditionOracle(url);
}

ConditionVerdict RemoteConditionOracle::parse_reply(const std::string& body) {
    ConditionVerdict v;
    v.source = engine::OracleSource::Remote;
    try {
        const auto j = nlohmann::json::parse(body);
        const auto label = j.at("label").get<std::string>();
        if (auto tri = engine::tri_from_label(to_lower(trim(label)))) {
            v.verdict = *tri;
            v.raw_label = std::string(engine::to_label(*tri));
            return v;
        }
        spdlog::warn("remote checker label '{}' is not a verbalizer; treating as unknown", label);
    } catch (const nlohmann::json::exception& e) {
        spdlog::warn("malformed remote checker reply ({}); treating as unknown", e.what());
    }
    return v;
}

ConditionVerdict RemoteConditionOracle::check_condition(const engine::Scene& scene, std::string_view question) {
    if (question.empty()) throw std::invalid_argument("condition question must be non-empty");
    const nlohmann::json body = {{"scene", scene.context}, {"question", std::string(question)}};
    auto delay = retry_.base_delay;
    std::string last;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        httplib::Client cli(scheme_host_port_);
        cli.set_connection_timeout(timeout_seconds_);
        cli.set_read_timeout(timeout_seconds_);
        auto res = cli.Post(path_, body.dump(), "application/json");
        if (res && res->status == 200) return parse_reply(res->body);
        if (res && res->status < 500 && res->status != 429) {
            spdlog::warn("remote checker answered HTTP {}; treating as unknown", res->status);
            ConditionVerdict v;
            v.source = engine::OracleSource::Remote;
            return v;
        }
        last = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
        if (attempt < retry_.max_attempts && delay.count() > 0) {
            std::this_thread::sleep_for(delay);
            delay = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * retry_.multiplier));
        }
    }
    throw engine::OracleUnavailable("remote checker unavailable: " + last);
}

}  // namespace cprofile::oracles
