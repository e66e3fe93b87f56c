// cprofile: codify character profiles, evaluate them, evolve them, chat and serve.

#include <iostream>
#include <optional>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "cprofile/cli/commands.hpp"
#include "cprofile/cli/config.hpp"
#include "cprofile/llm/client.hpp"

using namespace cprofile;

namespace {

struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> benchmark, profiles, output, provider, mock_script, model, oracle_model, granularity, mode,
        oracle, nli, condition_table, nli_table, templates, cache_dir;
    std::optional<double> temperature;
    std::optional<int> cot_budget, k, workers, max_attempts;
    std::optional<std::uint64_t> seed;
    bool randomness = false;
    bool no_nli_scene = false;
    bool verbose = false;
};

void add_common(CLI::App& app, Overrides& o) {
    app.add_option("--config", o.config, "JSON run config; flags override its keys");
    app.add_option("--benchmark", o.benchmark, "benchmark.json");
    app.add_option("--profiles", o.profiles, "profile store root");
    app.add_option("--output", o.output, "directory for runs and transcripts");
    app.add_option("--provider", o.provider, "http or mock");
    app.add_option("--mock-script", o.mock_script, "scripted replies for the mock provider");
    app.add_option("--model", o.model, "generation model");
    app.add_option("--oracle-model", o.oracle_model, "model for condition checks and judges");
    app.add_option("--temperature", o.temperature, "generation temperature");
    app.add_option("--granularity", o.granularity, "section, paragraph or sentence");
    app.add_flag("--randomness", o.randomness, "ask the codifier to encode randomness");
    app.add_option("--mode", o.mode, "vanilla, textual, codified, codified_rag or ensemble");
    app.add_option("--cot-budget", o.cot_budget, "reasoning steps before answering (0 disables)");
    app.add_option("--k", o.k, "samples per scene");
    app.add_option("--seed", o.seed, "base seed for all randomness");
    app.add_option("--workers", o.workers, "parallel workers");
    app.add_option("--max-attempts", o.max_attempts, "codify and revise attempts");
    app.add_option("--oracle", o.oracle, "llm, table or remote");
    app.add_option("--nli", o.nli, "llm or table");
    app.add_flag("--no-nli-scene", o.no_nli_scene, "leave the scene out of NLI judge prompts");
    app.add_option("--condition-table", o.condition_table, "condition table JSON");
    app.add_option("--nli-table", o.nli_table, "NLI table JSON");
    app.add_option("--templates", o.templates, "directory of prompt template overrides");
    app.add_option("--cache-dir", o.cache_dir, "persist temperature-0 completions here");
    app.add_flag("-v,--verbose", o.verbose, "debug logging");
}

cli::RunConfig resolve(const Overrides& o) {
    cli::RunConfig c = o.config ? cli::load_config(*o.config) : cli::RunConfig{};
    if (o.benchmark) c.benchmark = *o.benchmark;
    if (o.profiles) c.profiles = *o.profiles;
    if (o.output) c.output = *o.output;
    if (o.provider) c.provider = *o.provider;
    if (o.mock_script) c.mock_script = *o.mock_script;
    if (o.model) c.model = *o.model;
    if (o.oracle_model) c.oracle_model = *o.oracle_model;
    if (o.temperature) c.temperature = *o.temperature;
    if (o.granularity) c.granularity = *o.granularity;
    if (o.randomness) c.include_randomness = true;
    if (o.mode) c.mode = *o.mode;
    if (o.cot_budget) c.cot_budget = *o.cot_budget;
    if (o.k) c.k = *o.k;
    if (o.seed) c.base_seed = *o.seed;
    if (o.workers) c.workers = *o.workers;
    if (o.max_attempts) c.max_attempts = *o.max_attempts;
    if (o.oracle) c.oracle = *o.oracle;
    if (o.nli) c.nli = *o.nli;
    if (o.no_nli_scene) c.nli_scene_context = false;
    if (o.condition_table) c.condition_table = *o.condition_table;
    if (o.nli_table) c.nli_table = *o.nli_table;
    if (o.templates) c.templates = *o.templates;
    if (o.cache_dir) c.cache_dir = *o.cache_dir;
    cli::apply_env(c);
    cli::validate(c);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Codified character profiles: codify, evaluate, evolve, chat and serve"};
    app.require_subcommand(1);
    Overrides o;
    add_common(app, o);
    app.fallthrough();

    std::string profile_path;
    auto* codify = app.add_subcommand("codify", "Codify a profile JSON into version 0 of its store");
    codify->add_option("--profile", profile_path, "profile JSON {character, artifact, text}")->required();

    std::string scenario;
    std::optional<std::string> run_dir;
    auto* eval = app.add_subcommand("eval", "Run a benchmark scenario");
    eval->add_option("scenario", scenario, "basic, evolving or stochastic")
        ->required()
        ->check(CLI::IsMember({"basic", "evolving", "stochastic"}));
    eval->add_option("--out", run_dir, "run directory (default <output>/<timestamp>)");

    auto* evolve = app.add_subcommand("evolve", "Evolve the stored profiles along the benchmark storyline");
    evolve->add_option("--out", run_dir, "run directory (default <output>/<timestamp>)");

    cli::ChatArgs chat_args;
    std::optional<int> chat_version;
    auto* chat = app.add_subcommand("chat", "Role-play interactively; one user turn per line");
    chat->add_option("--character", chat_args.character, "character name")->required();
    chat->add_option("--version", chat_version, "profile version (default: head)");
    chat->add_flag("--trace", chat_args.trace, "print trace events after each response");

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "HTTP API for the web console");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "port (0 picks a free one)");

    std::string distill_path = "distill.jsonl";
    auto* distill = app.add_subcommand("export-distill", "Export condition-check labels as JSONL");
    distill->add_option("--out", distill_path, "output JSONL");

    cli::ReportArgs report_args;
    std::optional<std::string> report_out;
    auto* report = app.add_subcommand("report", "Re-render a report from records JSONL");
    report->add_option("--records", report_args.records, "records.jsonl")->required();
    report->add_option("--k", report_args.k, "Best@K");
    report->add_option("--out", report_out, "also write report.json and report.txt here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitUsage;
    }
    spdlog::set_level(o.verbose ? spdlog::level::debug : spdlog::level::warn);
    spdlog::set_default_logger(spdlog::default_logger());

    try {
        if (*report) {
            if (report_out) report_args.out_dir = *report_out;
            return cli::run_report(report_args, std::cout);
        }
        const auto config = resolve(o);
        if (*codify) return cli::run_codify(config, cli::CodifyArgs{profile_path}, std::cout);
        if (*eval) {
            cli::EvalArgs args{scenario, std::nullopt};
            if (run_dir) args.run_dir = *run_dir;
            return cli::run_eval(config, args, std::cout);
        }
        if (*evolve) {
            std::optional<std::filesystem::path> dir;
            if (run_dir) dir = *run_dir;
            return cli::run_evolve(config, dir, std::cout);
        }
        if (*chat) {
            chat_args.version = chat_version;
            return cli::run_chat(config, chat_args, std::cin, std::cout);
        }
        if (*serve) return cli::run_serve(config, host, port, std::cout);
        if (*distill) return cli::run_export_distill(config, distill_path, std::cout);
    } catch (const cli::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return cli::kExitUsage;
    } catch (const llm::LlmUnavailable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitPartial;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitPartial;
    }
    return cli::kExitUsage;
}
