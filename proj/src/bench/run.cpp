#include "cprofile/bench/run.hpp"

#include <atomic>
#include <functional>
#include <optional>
#include <thread>

#include <spdlog/spdlog.h>

#include "cprofile/codifier/codify.hpp"
#include "cprofile/evolver/evolve.hpp"
#include "cprofile/util/text.hpp"

namespace cprofile::bench {

namespace {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) body(i);
    };
    const int count = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int t = 1; t < count; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

bool needs_programs(responder::Mode m) { return m == responder::Mode::Codified || m == responder::Mode::Ensemble; }

// The programs a mode executes for one character.
std::vector<dsl::Program> programs_for(const RunInputs& in, const CharacterEntry& c, responder::Mode mode) {
    if (mode == responder::Mode::CodifiedRag) {
        auto segs = c.profile.segments.empty() ? codifier::segment_profile(c.profile.text, codifier::Granularity::Paragraph)
                                               : c.profile.segments;
        std::vector<dsl::Program> out;
        for (const auto& s : segs) out.push_back(codifier::rag_wrapper(s));
        return out;
    }
    if (!needs_programs(mode)) return {};
    auto it = in.stores.find(c.character);
    if (it == in.stores.end() || it->second == nullptr) throw std::invalid_argument("no codified profile for " + c.character);
    return it->second->programs(it->second->head());
}

int version_of(const RunInputs& in, const CharacterEntry& c, responder::Mode mode) {
    if (!needs_programs(mode)) return 0;
    return in.stores.at(c.character)->head();
}

EvalRecord failed_record(const engine::Scene& scene, const CharacterEntry& c, responder::Mode mode, int version,
                         const std::string& error, std::optional<std::uint64_t> k_index = std::nullopt) {
    EvalRecord r;
    r.scene_id = scene.id;
    r.character = c.character;
    r.artifact = scene.artifact;
    r.tier = c.tier;
    r.mode = mode;
    r.version_used = version;
    r.k_index = k_index;
    r.error = error;
    spdlog::error("{}/{} failed: {}", c.character, scene.id, error);
    return r;
}

struct Job {
    const CharacterEntry* entry;
    const engine::Scene* scene;
    const std::vector<dsl::Program>* programs;
    int version;
};

std::vector<Job> jobs_for(const RunInputs& in, const std::vector<std::vector<dsl::Program>>& programs,
                          const std::vector<int>& versions) {
    std::vector<Job> jobs;
    for (std::size_t ci = 0; ci < in.benchmark.characters.size(); ++ci) {
        const auto& c = in.benchmark.characters[ci];
        for (const auto& s : c.scenes) jobs.push_back(Job{&c, &s, &programs[ci], versions[ci]});
    }
    return jobs;
}

EvalRecord run_one(const RunInputs& in, const RunOptions& options, const Job& job) {
    const auto& scene = *job.scene;
    const auto& c = *job.entry;
    try {
        if (!scene.reference_action) throw std::invalid_argument("scene has no reference action");
        responder::Grounding g;
        g.profile_text = c.profile.text;
        if (!job.programs->empty()) {
            engine::OracleCache memo;
            auto exec = responder::ground(*job.programs, scene, in.oracle, engine::RunSeed{options.base_seed, scene.id, 0}, &memo);
            exec.profile_text = c.profile.text;
            g = std::move(exec);
        }
        auto resp = responder::respond(scene, c.character, g, options.respond, in.llm);
        auto rec = make_record(scene, c.tier, resp, job.version);
        rec.character = c.character;
        rec.nli = in.judge.judge(&scene, *scene.reference_action, resp.response);
        return rec;
    } catch (const std::exception& e) {
        return failed_record(scene, c, options.respond.mode, job.version, e.what());
    }
}

nlohmann::ordered_json options_json(const RunOptions& o) {
    nlohmann::ordered_json j;
    j["mode"] = std::string(responder::to_string(o.respond.mode));
    j["cot_budget"] = o.respond.cot_budget;
    j["guiding_question"] = o.respond.guiding_question;
    j["base_seed"] = o.base_seed;
    j["workers"] = o.workers;
    j["k"] = o.k;
    j["max_attempts"] = o.max_attempts;
    return j;
}

}  // namespace

RunResult run_basic(const RunInputs& in, const RunOptions& options) {
    std::vector<std::vector<dsl::Program>> programs;
    std::vector<int> versions;
    for (const auto& c : in.benchmark.characters) {
        programs.push_back(programs_for(in, c, options.respond.mode));
        versions.push_back(version_of(in, c, options.respond.mode));
    }
    const auto jobs = jobs_for(in, programs, versions);
    std::vector<std::optional<EvalRecord>> slots(jobs.size());
    parallel_for(jobs.size(), options.workers, [&](std::size_t i) { slots[i] = run_one(in, options, jobs[i]); });
    RunResult out;
    for (auto& s : slots) out.records.push_back(std::move(*s));
    out.report = score_run(out.records);
    out.report.scenario = "basic";
    out.report.config = options_json(options);
    return out;
}

RunResult run_evolving(const RunInputs& in, const RunOptions& options) {
    if (options.respond.mode != responder::Mode::Codified) throw std::invalid_argument("evolving runs need CODIFIED mode");
    const auto& chars = in.benchmark.characters;
    std::vector<evolver::EvolvingResult> results(chars.size());
    parallel_for(chars.size(), options.workers, [&](std::size_t i) {
        auto it = in.stores.find(chars[i].character);
        if (it == in.stores.end() || it->second == nullptr) {
            for (const auto& s : chars[i].scenes) {
                results[i].records.push_back(failed_record(s, chars[i], options.respond.mode, 0, "no codified profile"));
            }
            return;
        }
        evolver::EvolvingOptions eo;
        eo.respond = options.respond;
        eo.base_seed = options.base_seed;
        eo.max_attempts = options.max_attempts;
        eo.tier = chars[i].tier;
        results[i] = evolver::evolving_run(chars[i].scenes, *it->second, in.oracle, in.judge, in.llm, eo);
    });
    RunResult out;
    for (auto& r : results) {
        for (auto& rec : r.records) out.records.push_back(std::move(rec));
        for (auto& rev : r.revisions) out.revisions.push_back(std::move(rev));
    }
    out.report = score_run(out.records);
    out.report.scenario = "evolving";
    out.report.order_dependent = true;
    out.report.config = options_json(options);
    return out;
}

RunResult run_stochastic(const RunInputs& in, const RunOptions& options) {
    if (options.k < 2) throw std::invalid_argument("stochastic runs need k >= 2");
    if (options.respond.mode != responder::Mode::Codified) throw std::invalid_argument("stochastic runs need CODIFIED mode");
    std::vector<std::vector<dsl::Program>> programs;
    std::vector<int> versions;
    for (const auto& c : in.benchmark.characters) {
        programs.push_back(programs_for(in, c, options.respond.mode));
        versions.push_back(version_of(in, c, options.respond.mode));
    }
    const auto jobs = jobs_for(in, programs, versions);
    std::vector<std::vector<EvalRecord>> slots(jobs.size());
    parallel_for(jobs.size(), options.workers, [&](std::size_t i) {
        const auto& job = jobs[i];
        const auto& scene = *job.scene;
        try {
            if (!scene.reference_action) throw std::invalid_argument("scene has no reference action");
            auto runs = responder::respond_stochastic(scene, job.entry->character, *job.programs, in.oracle, options.respond,
                                                      in.llm, options.k, options.base_seed);
            for (const auto& resp : runs) {
                auto rec = make_record(scene, job.entry->tier, resp, job.version);
                rec.character = job.entry->character;
                try {
                    rec.nli = in.judge.judge(&scene, *scene.reference_action, resp.response);
                } catch (const std::exception& e) {
                    rec.error = e.what();
                }
                slots[i].push_back(std::move(rec));
            }
        } catch (const std::exception& e) {
            for (int r = 0; r < options.k; ++r) {
                slots[i].push_back(failed_record(scene, *job.entry, options.respond.mode, job.version, e.what(),
                                                 static_cast<std::uint64_t>(r)));
            }
        }
    });
    RunResult out;
    for (auto& s : slots) {
        for (auto& rec : s) out.records.push_back(std::move(rec));
    }
    out.report = score_run(out.records, options.k);
    out.report.scenario = "stochastic";
    out.report.config = options_json(options);
    return out;
}

void write_run(const std::filesystem::path& dir, const RunResult& result) {
    std::filesystem::create_directories(dir);
    write_text_file(dir / "records.jsonl", records_jsonl(result.records));
    write_text_file(dir / "report.json", to_json(result.report).dump(2) + "\n");
    write_text_file(dir / "report.txt", render_text(result.report));
    if (!result.revisions.empty()) {
        std::string log;
        for (const auto& r : result.revisions) log += evolver::to_json(r).dump() + "\n";
        write_text_file(dir / "revisions.jsonl", log);
    }
}

}  // namespace cprofile::bench
