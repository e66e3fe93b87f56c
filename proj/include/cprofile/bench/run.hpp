#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cprofile/bench/benchmark.hpp"
#include "cprofile/bench/score.hpp"
#include "cprofile/evolver/store.hpp"
#include "cprofile/llm/client.hpp"
#include "cprofile/oracles/judges.hpp"
#include "cprofile/responder/respond.hpp"

namespace cprofile::bench {

struct RunOptions {
    responder::RespondConfig respond;
    std::uint64_t base_seed = 0;
    int workers = 1;
    int k = 1;              // stochastic samples per scene
    int max_attempts = 3;   // evolving revisions
};

struct RunInputs {
    const BenchmarkSet& benchmark;
    /// Codified profile per character; required for the codified modes.
    std::map<std::string, evolver::VersionStore*> stores;
    engine::ConditionOracle& oracle;
    oracles::NliJudge& judge;
    llm::LlmContext llm;
};

struct RunResult {
    std::vector<EvalRecord> records;
    Report report;
    std::vector<evolver::Revision> revisions;  // evolving only
};

/// Every scene once, from the head version of each store. Scenes run in parallel.
RunResult run_basic(const RunInputs& in, const RunOptions& options);
/// Test, evolve, next scene; sequential per character, characters in parallel.
RunResult run_evolving(const RunInputs& in, const RunOptions& options);
/// k codified samples per scene with fresh randomness; needs k >= 2.
RunResult run_stochastic(const RunInputs& in, const RunOptions& options);

/// Writes records.jsonl, report.json and report.txt into `dir`.
void write_run(const std::filesystem::path& dir, const RunResult& result);

}  // namespace cprofile::bench
