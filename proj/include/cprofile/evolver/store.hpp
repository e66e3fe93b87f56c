#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "cprofile/dsl/ast.hpp"
#include "cprofile/oracles/judges.hpp"
#include "json.hpp"

namespace cprofile::evolver {

struct Revision {
    int version = 0;
    std::string scene_id;
    std::string blamed_segment;
    oracles::Relation issue = oracles::Relation::Contradicted;
    std::string old_source;
    std::string new_source;
    std::string rationale;
};

nlohmann::ordered_json to_json(const Revision& r);
Revision revision_from_json(const nlohmann::json& j);

/// segment id -> canonical CPL source
using Snapshot = std::map<std::string, std::string>;

/**
 * Versioned codified profile. Version 0 is the codifier output; each later
 * version replaces exactly one segment. With a root directory the store is
 * mirrored as `<root>/<slug>/v<N>/<segment>.cpl`, `revisions.jsonl` and
 * `store.json`. Readers may run concurrently with one writer.
 */
class VersionStore {
public:
    /// In-memory store. Sources are stored in canonical format.
    VersionStore(std::string character, const std::vector<dsl::Program>& initial);

    /// Creates (overwriting) the on-disk store for `character` under `root`.
    static VersionStore create(const std::filesystem::path& root, std::string character,
                               const std::vector<dsl::Program>& initial);
    /// Loads `<root>/<slug>`; throws std::runtime_error when it is missing or inconsistent.
    static VersionStore open(const std::filesystem::path& root, const std::string& character);

    const std::string& character() const { return character_; }
    int head() const;
    const std::vector<std::string>& segment_ids() const { return order_; }

    Snapshot snapshot(int version) const;
    /// Programs of `version` in segment order.
    std::vector<dsl::Program> programs(int version) const;
    std::vector<Revision> revisions() const;

    /**
     * Appends a new version replacing `rev.blamed_segment` with `rev.new_source`
     * (canonicalized). Throws std::invalid_argument when the source does not
     * parse, names an unknown segment, or leaves the program unchanged.
     */
    Revision commit(Revision rev);

    /// Every version rebuilt from version 0 and the revision log.
    std::vector<Snapshot> replay() const;

    std::filesystem::path directory() const { return dir_; }

private:
    VersionStore() = default;
    void write_version(int version, const Snapshot& snap) const;
    void write_meta() const;

    std::string character_;
    std::vector<std::string> order_;
    std::vector<Snapshot> versions_;
    std::vector<Revision> revisions_;
    std::filesystem::path dir_;
    std::unique_ptr<std::shared_mutex> mutex_ = std::make_unique<std::shared_mutex>();
};

}  // namespace cprofile::evolver
