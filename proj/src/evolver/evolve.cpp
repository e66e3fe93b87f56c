#include "cprofile/evolver/evolve.hpp"

#include <algorithm>
#include <map>

#include <spdlog/spdlog.h>

#include "cprofile/dsl/parser.hpp"
#include "cprofile/util/text.hpp"

namespace cprofile::evolver {

std::string_view issue_phrase(oracles::Relation issue) {
    return issue == oracles::Relation::Neutral ? "relevant but not detailed" : "contradicted";
}

namespace {

std::string statements_list(const std::vector<engine::TriggeredStatement>& triggered, const std::string& segment_id) {
    std::string out;
    for (const auto& t : triggered) {
        if (t.segment_id == segment_id) out += "  - " + t.text + "\n";
    }
    return out;
}

// The listed id occurring first in the answer, if any.
std::optional<std::string> pick_id(const std::string& answer, const std::vector<std::string>& ids) {
    std::optional<std::string> best;
    std::size_t best_pos = std::string::npos;
    for (const auto& id : ids) {
        const auto pos = find_whole_word(answer, id);
        if (pos != std::string::npos && (best_pos == std::string::npos || pos < best_pos)) {
            best = id;
            best_pos = pos;
        }
    }
    return best;
}

std::string prose_around_code(const std::string& completion) {
    const auto open = completion.find("```");
    if (open == std::string::npos) return "";
    std::string before(trim(std::string_view(completion).substr(0, open)));
    const auto close = completion.find("```", open + 3);
    std::string after = close == std::string::npos ? "" : std::string(trim(std::string_view(completion).substr(close + 3)));
    if (!before.empty() && !after.empty()) return before + "\n" + after;
    return before.empty() ? after : before;
}

}  // namespace

Blame diagnose(const engine::Scene& scene, const std::string& character, const responder::ResponseRecord& response,
               const oracles::NliVerdict& verdict, const std::vector<std::string>& segment_ids, llm::LlmContext llm) {
    if (verdict.relation == oracles::Relation::Entailed) throw std::invalid_argument("diagnose needs a non-entailed verdict");
    if (response.mode != responder::Mode::Codified) throw std::invalid_argument("diagnose needs a CODIFIED response");
    if (segment_ids.empty()) throw std::invalid_argument("diagnose needs at least one segment");
    if (!scene.reference_action) throw std::invalid_argument("scene " + scene.id + " has no reference action");

    std::string segments;
    for (const auto& id : segment_ids) {
        const auto list = statements_list(response.triggered, id);
        segments += id + ":\n" + (list.empty() ? "  (fired nothing)\n" : list);
    }
    Blame blame;
    blame.issue = verdict.relation;
    llm::Bindings b{{"character", character},
                    {"scene", scene.context},
                    {"reference", *scene.reference_action},
                    {"response", response.response},
                    {"issue", std::string(issue_phrase(verdict.relation))},
                    {"segments", segments},
                    {"retry_note", ""}};
    std::string last_answer;
    for (int attempt = 1; attempt <= 2; ++attempt) {
        if (attempt == 2) {
            std::string ids;
            for (const auto& id : segment_ids) ids += (ids.empty() ? "" : ", ") + id;
            b["retry_note"] = "Your previous answer \"" + last_answer + "\" is not one of the listed ids (" + ids + ").\n";
        }
        const auto ex = llm.client.complete(llm.templates.get("blame"), b, llm.config);
        blame.attempts = attempt;
        last_answer = std::string(trim(ex.completion));
        if (auto id = pick_id(ex.completion, segment_ids)) {
            blame.segment_id = *id;
            return blame;
        }
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& t : response.triggered) ++counts[t.segment_id];
    std::size_t best = 0;
    for (std::size_t i = 1; i < segment_ids.size(); ++i) {
        if (counts[segment_ids[i]] > counts[segment_ids[best]]) best = i;
    }
    spdlog::warn("blame answers for scene {} named no segment; falling back to {}", scene.id, segment_ids[best]);
    blame.segment_id = segment_ids[best];
    blame.fallback = true;
    return blame;
}

ReviseFailed::ReviseFailed(std::string segment_id, int attempts, std::string diagnostics)
    : std::runtime_error("could not revise " + segment_id + " after " + std::to_string(attempts) + " attempts:\n" + diagnostics),
      segment_id_(std::move(segment_id)),
      diagnostics_(std::move(diagnostics)) {}

Revision revise_segment(VersionStore& store, const Blame& blame, const engine::Scene& scene, const std::string& character,
                        const std::vector<engine::TriggeredStatement>& triggered, const std::string& response,
                        llm::LlmContext llm, int max_attempts) {
    if (max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");
    if (!scene.reference_action) throw std::invalid_argument("scene " + scene.id + " has no reference action");
    const auto current = store.snapshot(store.head());
    const auto it = current.find(blame.segment_id);
    if (it == current.end()) throw std::invalid_argument("segment " + blame.segment_id + " is not in the current version");
    const std::string& old_source = it->second;

    const auto list = statements_list(triggered, blame.segment_id);
    std::string diagnostics;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        llm::Bindings b{{"character", character},
                        {"segment_id", blame.segment_id},
                        {"old_source", old_source},
                        {"scene", scene.context},
                        {"triggered", list.empty() ? "(fired nothing)\n" : list},
                        {"reference", *scene.reference_action},
                        {"response", response},
                        {"issue", std::string(issue_phrase(blame.issue))},
                        {"diagnostics", diagnostics.empty() ? "" : "\nYour previous program was rejected:\n" + diagnostics}};
        const auto ex = llm.client.complete(llm.templates.get("revise"), b, llm.config);
        const auto code = llm::extract_code_block(ex.completion);
        auto parsed = dsl::parse(code, blame.segment_id);
        if (!parsed.ok()) {
            diagnostics = dsl::render(parsed.errors()) + "\n";
            continue;
        }
        Revision rev;
        rev.scene_id = scene.id;
        rev.blamed_segment = blame.segment_id;
        rev.issue = blame.issue;
        rev.new_source = code;
        rev.rationale = prose_around_code(ex.completion);
        try {
            return store.commit(std::move(rev));
        } catch (const std::invalid_argument& e) {
            diagnostics = std::string(e.what()) + "\n";
        }
    }
    spdlog::warn("revision of {} for scene {} failed: {}", blame.segment_id, scene.id, diagnostics);
    throw ReviseFailed(blame.segment_id, max_attempts, diagnostics);
}

EvolvingResult evolving_run(const std::vector<engine::Scene>& scenes, VersionStore& store, engine::ConditionOracle& oracle,
                            oracles::NliJudge& judge, llm::LlmContext llm, const EvolvingOptions& options) {
    if (options.respond.mode != responder::Mode::Codified) throw std::invalid_argument("evolving runs need CODIFIED mode");
    for (std::size_t i = 1; i < scenes.size(); ++i) {
        if (scenes[i].order_index < scenes[i - 1].order_index) throw std::invalid_argument("scenes must be sorted by order_index");
    }
    EvolvingResult out;
    std::uint64_t seq = 0;
    for (const auto& scene : scenes) {
        const int version = store.head();
        bench::EvalRecord rec;
        responder::ResponseRecord response;
        try {
            if (!scene.reference_action) throw std::invalid_argument("scene " + scene.id + " has no reference action");
            engine::OracleCache memo;
            auto grounding = responder::ground(store.programs(version), scene, oracle,
                                               engine::RunSeed{options.base_seed, scene.id, 0}, &memo);
            response = responder::respond(scene, store.character(), grounding, options.respond, llm);
            rec = bench::make_record(scene, options.tier, response, version);
            if (rec.character.empty()) rec.character = store.character();
            rec.nli = judge.judge(&scene, *scene.reference_action, response.response);
        } catch (const std::exception& e) {
            rec = bench::EvalRecord{};
            rec.scene_id = scene.id;
            rec.character = scene.character;
            rec.artifact = scene.artifact;
            rec.tier = options.tier;
            rec.mode = options.respond.mode;
            rec.version_used = version;
            rec.error = e.what();
            spdlog::error("scene {} failed: {}", scene.id, e.what());
        }
        out.timeline.push_back({seq++, TimelineEvent::Kind::Evaluated, scene.id, version});
        out.records.push_back(rec);
        if (!rec.nli || rec.nli->relation == oracles::Relation::Entailed) continue;

        try {
            const auto blame = diagnose(scene, store.character(), response, *rec.nli, store.segment_ids(), llm);
            auto rev = revise_segment(store, blame, scene, store.character(), response.triggered, response.response, llm,
                                      options.max_attempts);
            out.timeline.push_back({seq++, TimelineEvent::Kind::Committed, scene.id, rev.version});
            out.revisions.push_back(std::move(rev));
        } catch (const std::exception& e) {
            spdlog::warn("scene {} not evolved: {}", scene.id, e.what());
            out.timeline.push_back({seq++, TimelineEvent::Kind::ReviseFailed, scene.id, store.head()});
        }
    }
    return out;
}

}  // namespace cprofile::evolver
