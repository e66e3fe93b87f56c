#include "cprofile/cli/commands.hpp"

#include <chrono>
#include <csignal>
#include <ctime>
#include <iostream>

#include <spdlog/spdlog.h>

#include "cprofile/bench/run.hpp"
#include "cprofile/cli/serve.hpp"
#include "cprofile/cli/services.hpp"
#include "cprofile/codifier/codify.hpp"
#include "cprofile/evolver/evolve.hpp"
#include "cprofile/responder/chat.hpp"
#include "cprofile/util/text.hpp"

namespace cprofile::cli {

namespace {

std::filesystem::path default_run_dir(const RunConfig& c) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return c.output / buf;
}

// Loads the store of every benchmark character; the caller owns them.
std::map<std::string, std::unique_ptr<evolver::VersionStore>> open_stores(const RunConfig& c, const bench::BenchmarkSet& b) {
    std::map<std::string, std::unique_ptr<evolver::VersionStore>> stores;
    for (const auto& ch : b.characters) {
        try {
            stores[ch.character] = std::make_unique<evolver::VersionStore>(evolver::VersionStore::open(c.profiles, ch.character));
        } catch (const std::exception& e) {
            throw ConfigError("profiles", std::string(e.what()) + " (run `cprofile codify` first)");
        }
    }
    return stores;
}

bench::RunOptions run_options(const RunConfig& c) {
    bench::RunOptions o;
    o.respond.mode = *responder::mode_from_string(c.mode);
    o.respond.cot_budget = c.cot_budget;
    o.base_seed = c.base_seed;
    o.workers = c.workers;
    o.k = c.k;
    o.max_attempts = c.max_attempts;
    return o;
}

int finish_run(const RunConfig& c, bench::RunResult& result, const std::filesystem::path& dir, std::ostream& out) {
    result.report.config = to_json(c);
    bench::write_run(dir, result);
    out << bench::render_text(result.report);
    out << "Wrote " << (dir / "records.jsonl").string() << "\n";
    return result.report.failures == 0 && result.report.incomplete.empty() ? kExitOk : kExitPartial;
}

}  // namespace

int run_codify(const RunConfig& config, const CodifyArgs& args, std::ostream& out) {
    auto services = make_services(config);
    codifier::Profile profile;
    try {
        profile = codifier::load_profile(args.profile);
    } catch (const std::exception& e) {
        throw ConfigError("--profile", e.what());
    }
    const auto granularity = *codifier::granularity_from_string(config.granularity);
    codifier::CodifyOptions opts{config.max_attempts, config.include_randomness};
    auto report = codifier::codify_profile(profile, services->llm(), granularity, opts, config.workers);
    std::vector<dsl::Program> programs;
    for (const auto& s : report.segments) programs.push_back(s.program);
    auto store = evolver::VersionStore::create(config.profiles, profile.character, programs);
    write_text_file(store.directory() / "manifest.json", manifest(report, granularity, opts, config.model).dump(2) + "\n");
    out << "Codified " << report.segments.size() << " segments of " << profile.character << " into "
        << (store.directory() / "v0").string() << "\n";
    for (const auto& f : report.failures) {
        out << "  " << f.segment_id << " fell back to a relevance wrapper after " << f.attempts << " attempts\n";
    }
    return report.failures.empty() ? kExitOk : kExitPartial;
}

int run_eval(const RunConfig& config, const EvalArgs& args, std::ostream& out) {
    if (config.benchmark.empty()) throw ConfigError("benchmark", "required for eval");
    auto services = make_services(config);
    bench::BenchmarkSet benchmark;
    try {
        benchmark = bench::load_benchmark(config.benchmark);
    } catch (const std::exception& e) {
        throw ConfigError("benchmark", e.what());
    }
    auto options = run_options(config);
    const auto mode = options.respond.mode;
    const bool codified = mode == responder::Mode::Codified || mode == responder::Mode::Ensemble;

    std::map<std::string, std::unique_ptr<evolver::VersionStore>> stores;
    if (codified || args.scenario == "evolving") stores = open_stores(config, benchmark);
    const auto dir = args.run_dir.value_or(default_run_dir(config));

    // An evolving evaluation starts from the codifier output and leaves the shared store untouched.
    if (args.scenario == "evolving") {
        for (auto& [name, s] : stores) {
            auto fresh = evolver::VersionStore::create(dir / "profiles", name, s->programs(0));
            s = std::make_unique<evolver::VersionStore>(std::move(fresh));
        }
    }
    bench::RunInputs in{benchmark, {}, *services->oracle, *services->judge, services->llm()};
    for (auto& [name, s] : stores) in.stores[name] = s.get();

    bench::RunResult result;
    if (args.scenario == "basic") {
        result = bench::run_basic(in, options);
    } else if (args.scenario == "evolving") {
        result = bench::run_evolving(in, options);
    } else if (args.scenario == "stochastic") {
        if (config.temperature > llm::kMaxStochasticTemperature) throw ConfigError("temperature", "must be <= 0.7 for stochastic runs");
        if (config.k < 2) throw ConfigError("k", "must be >= 2 for stochastic runs");
        result = bench::run_stochastic(in, options);
    } else {
        throw ConfigError("scenario", "must be basic, evolving or stochastic");
    }
    return finish_run(config, result, dir, out);
}

int run_evolve(const RunConfig& config, const std::optional<std::filesystem::path>& run_dir, std::ostream& out) {
    if (config.benchmark.empty()) throw ConfigError("benchmark", "required for evolve");
    auto services = make_services(config);
    const auto benchmark = bench::load_benchmark(config.benchmark);
    auto stores = open_stores(config, benchmark);
    auto options = run_options(config);
    options.respond.mode = responder::Mode::Codified;
    bench::RunInputs in{benchmark, {}, *services->oracle, *services->judge, services->llm()};
    for (auto& [name, s] : stores) in.stores[name] = s.get();
    auto result = bench::run_evolving(in, options);
    for (const auto& [name, s] : stores) out << name << ": head is now v" << s->head() << "\n";
    return finish_run(config, result, run_dir.value_or(default_run_dir(config)), out);
}

int run_chat(const RunConfig& config, const ChatArgs& args, std::istream& in, std::ostream& out) {
    auto services = make_services(config);
    evolver::VersionStore store = [&] {
        try {
            return evolver::VersionStore::open(config.profiles, args.character);
        } catch (const std::exception& e) {
            throw ConfigError("--character", e.what());
        }
    }();
    const int version = args.version.value_or(store.head());
    if (version < 0 || version > store.head()) throw ConfigError("--version", "no such version");
    responder::ChatSession session("chat", store.character(), store.programs(version), *services->oracle, services->llm(),
                                   config.base_seed);
    std::string line;
    while (std::getline(in, line)) {
        const auto text = std::string(trim(line));
        if (text.empty()) continue;
        if (text == "/quit" || text == "/exit") break;
        auto t = session.turn(text);
        out << store.character() << ": " << t.response << "\n";
        if (args.trace) {
            for (const auto& e : t.trace) out << "  " << engine::to_json(e).dump() << "\n";
        }
        out.flush();
    }
    return kExitOk;
}

namespace {
cli::ApiServer* g_server = nullptr;
extern "C" void on_signal(int) {
    if (g_server != nullptr) g_server->stop();
}
}  // namespace

int run_serve(const RunConfig& config, const std::string& host, int port, std::ostream& out) {
    auto services = make_services(config);
    ServeContext ctx{config.profiles, config.output / "transcripts", *services->oracle, services->llm(), config.base_seed};
    ApiServer server(ctx);
    const int bound = server.bind(host, port);
    if (bound < 0) {
        spdlog::error("cannot bind {}:{}", host, port);
        return kExitPartial;
    }
    out << "Serving on http://" << host << ":" << bound << "\n";
    out.flush();
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const bool ok = server.listen();
    g_server = nullptr;
    return ok ? kExitOk : kExitPartial;
}

int run_export_distill(const RunConfig& config, const std::filesystem::path& path, std::ostream& out) {
    if (config.benchmark.empty()) throw ConfigError("benchmark", "required for export-distill");
    auto services = make_services(config);
    const auto benchmark = bench::load_benchmark(config.benchmark);
    auto stores = open_stores(config, benchmark);
    RecordingOracle recorder(*services->oracle);
    int failures = 0;
    for (const auto& c : benchmark.characters) {
        const auto programs = stores.at(c.character)->programs(stores.at(c.character)->head());
        for (const auto& s : c.scenes) {
            try {
                engine::execute_profile(programs, s, recorder, engine::RunSeed{config.base_seed, s.id, 0});
            } catch (const std::exception& e) {
                ++failures;
                spdlog::error("{}/{}: {}", c.character, s.id, e.what());
            }
        }
    }
    const auto records = recorder.records();
    if (records.empty()) {
        out << "No condition checks were made; nothing to export\n";
        return kExitPartial;
    }
    const auto n = oracles::export_distillation_data(records, path);
    out << "Exported " << n << " labeled condition checks to " << path.string() << "\n";
    return failures == 0 ? kExitOk : kExitPartial;
}

int run_report(const ReportArgs& args, std::ostream& out) {
    std::vector<bench::EvalRecord> records;
    try {
        records = bench::load_records_jsonl(args.records);
    } catch (const std::exception& e) {
        throw ConfigError("--records", e.what());
    }
    if (args.k && *args.k < 1) throw ConfigError("--k", "must be >= 1");
    auto report = bench::score_run(records, args.k);
    report.scenario = "report";
    report.config = nlohmann::ordered_json{{"records", args.records.string()},
                                           {"k", args.k ? nlohmann::ordered_json(*args.k) : nlohmann::ordered_json(nullptr)}};
    const auto text = bench::render_text(report);
    out << text;
    if (args.out_dir) {
        std::filesystem::create_directories(*args.out_dir);
        write_text_file(*args.out_dir / "report.json", bench::to_json(report).dump(2) + "\n");
        write_text_file(*args.out_dir / "report.txt", text);
    }
    return report.incomplete.empty() ? kExitOk : kExitPartial;
}

}  // namespace cprofile::cli
