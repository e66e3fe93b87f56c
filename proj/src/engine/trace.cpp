#include "cprofile/engine/trace.hpp"

#include <stdexcept>

#include "cprofile/util/overloaded.hpp"

namespace cprofile::engine {

namespace {

Tri tri_from_name(const std::string& s) {
    if (s == "true") return Tri::True;
    if (s == "false") return Tri::False;
    if (s == "unknown") return Tri::Unknown;
    throw std::invalid_argument("bad verdict in trace: " + s);
}

OracleSource source_from_name(const std::string& s) {
    if (s == "llm") return OracleSource::Llm;
    if (s == "table") return OracleSource::Table;
    if (s == "remote") return OracleSource::Remote;
    throw std::invalid_argument("bad oracle source in trace: " + s);
}

std::string branch_name(const BranchTaken& b) {
    switch (b.kind) {
        case BranchTaken::Kind::Then: return "then";
        case BranchTaken::Kind::Elif: return "elif(" + std::to_string(b.elif_index) + ")";
        case BranchTaken::Kind::Else: return "else";
        case BranchTaken::Kind::Skipped: return "skipped";
    }
    return "skipped";
}

BranchTaken branch_from_name(const std::string& s) {
    if (s == "then") return {BranchTaken::Kind::Then, 0};
    if (s == "else") return {BranchTaken::Kind::Else, 0};
    if (s == "skipped") return {BranchTaken::Kind::Skipped, 0};
    if (s.rfind("elif(", 0) == 0 && s.back() == ')') {
        return {BranchTaken::Kind::Elif, static_cast<std::size_t>(std::stoul(s.substr(5, s.size() - 6)))};
    }
    throw std::invalid_argument("bad branch kind in trace: " + s);
}

}  // namespace

nlohmann::ordered_json to_json(const TraceEvent& event) {
    nlohmann::ordered_json j;
    j["v"] = kTraceSchemaVersion;
    std::visit(overloaded{
                   [&](const Checked& e) {
                       j["type"] = "checked";
                       j["segment"] = event.segment_id;
                       j["question"] = e.question;
                       j["verdict"] = to_string(e.verdict);
                       j["source"] = to_string(e.source);
                       j["cached"] = e.cached;
                   },
                   [&](const ChanceDrawn& e) {
                       j["type"] = "chance";
                       j["segment"] = event.segment_id;
                       j["p"] = e.p;
                       j["draw"] = e.draw;
                       j["passed"] = e.passed;
                   },
                   [&](const ChoiceMade& e) {
                       j["type"] = "choice";
                       j["segment"] = event.segment_id;
                       j["options"] = e.options;
                       j["chosen_index"] = e.chosen_index;
                   },
                   [&](const Triggered& e) {
                       j["type"] = "triggered";
                       j["segment"] = event.segment_id;
                       j["text"] = e.text;
                   },
                   [&](const BranchTaken& e) {
                       j["type"] = "branch";
                       j["segment"] = event.segment_id;
                       j["kind"] = branch_name(e);
                   },
               },
               event.event);
    return j;
}

nlohmann::ordered_json to_json(const Trace& trace) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : trace) arr.push_back(to_json(e));
    return arr;
}

TraceEvent trace_event_from_json(const nlohmann::json& j) {
    if (j.value("v", 0) != kTraceSchemaVersion) throw std::invalid_argument("unsupported trace schema version");
    TraceEvent ev;
    ev.segment_id = j.value("segment", std::string{});
    const auto type = j.at("type").get<std::string>();
    if (type == "checked") {
        ev.event = Checked{j.at("question").get<std::string>(), tri_from_name(j.at("verdict").get<std::string>()),
                           source_from_name(j.at("source").get<std::string>()), j.at("cached").get<bool>()};
    } else if (type == "chance") {
        ev.event = ChanceDrawn{j.at("p").get<double>(), j.at("draw").get<double>(), j.at("passed").get<bool>()};
    } else if (type == "choice") {
        ev.event = ChoiceMade{j.at("options").get<std::vector<std::string>>(), j.at("chosen_index").get<std::size_t>()};
    } else if (type == "triggered") {
        ev.event = Triggered{j.at("text").get<std::string>()};
    } else if (type == "branch") {
        ev.event = branch_from_name(j.at("kind").get<std::string>());
    } else {
        throw std::invalid_argument("unknown trace event type: " + type);
    }
    return ev;
}

Trace trace_from_json(const nlohmann::json& j) {
    Trace t;
    for (const auto& e : j) t.push_back(trace_event_from_json(e));
    return t;
}

std::size_t oracle_calls(const Trace& trace) {
    std::size_t n = 0;
    for (const auto& e : trace) {
        if (const auto* c = std::get_if<Checked>(&e.event); c != nullptr && !c->cached) ++n;
    }
    return n;
}

}  // namespace cprofile::engine
