#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "cprofile/cli/config.hpp"

namespace cprofile::cli {

/// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;  // some scenes or segments failed; artifacts were still written
inline constexpr int kExitUsage = 2;

struct CodifyArgs {
    std::filesystem::path profile;
};
int run_codify(const RunConfig& config, const CodifyArgs& args, std::ostream& out);

struct EvalArgs {
    std::string scenario;                  // basic | evolving | stochastic
    std::optional<std::filesystem::path> run_dir;  // default: <output>/<timestamp>
};
int run_eval(const RunConfig& config, const EvalArgs& args, std::ostream& out);

/// Evolving run that commits revisions to the profile store in place.
int run_evolve(const RunConfig& config, const std::optional<std::filesystem::path>& run_dir, std::ostream& out);

struct ChatArgs {
    std::string character;
    std::optional<int> version;
    bool trace = false;
};
int run_chat(const RunConfig& config, const ChatArgs& args, std::istream& in, std::ostream& out);

int run_serve(const RunConfig& config, const std::string& host, int port, std::ostream& out);

int run_export_distill(const RunConfig& config, const std::filesystem::path& path, std::ostream& out);

struct ReportArgs {
    std::filesystem::path records;
    std::optional<int> k;
    std::optional<std::filesystem::path> out_dir;
};
int run_report(const ReportArgs& args, std::ostream& out);

}  // namespace cprofile::cli
