#include "cprofile/evolver/store.hpp"

#include <mutex>
#include <set>
#include <stdexcept>

#include "cprofile/dsl/format.hpp"
#include "cprofile/dsl/parser.hpp"
#include "cprofile/util/text.hpp"

namespace cprofile::evolver {

nlohmann::ordered_json to_json(const Revision& r) {
    nlohmann::ordered_json j;
    j["version"] = r.version;
    j["scene_id"] = r.scene_id;
    j["blamed_segment"] = r.blamed_segment;
    j["issue"] = std::string(oracles::to_string(r.issue));
    j["old_source"] = r.old_source;
    j["new_source"] = r.new_source;
    j["rationale"] = r.rationale;
    return j;
}

Revision revision_from_json(const nlohmann::json& j) {
    Revision r;
    r.version = j.at("version").get<int>();
    r.scene_id = j.at("scene_id").get<std::string>();
    r.blamed_segment = j.at("blamed_segment").get<std::string>();
    r.issue = oracles::relation_from_string(j.at("issue").get<std::string>()).value_or(oracles::Relation::Contradicted);
    r.old_source = j.at("old_source").get<std::string>();
    r.new_source = j.at("new_source").get<std::string>();
    r.rationale = j.value("rationale", std::string{});
    return r;
}

namespace {

std::string canonical(const std::string& source, const std::string& segment_id) {
    return dsl::format(dsl::parse_or_throw(source, segment_id));
}

}  // namespace

VersionStore::VersionStore(std::string character, const std::vector<dsl::Program>& initial) : character_(std::move(character)) {
    if (initial.empty()) throw std::invalid_argument("a profile store needs at least one segment");
    Snapshot v0;
    for (const auto& p : initial) {
        if (!v0.emplace(p.segment_id, dsl::format(p)).second) {
            throw std::invalid_argument("duplicate segment id " + p.segment_id);
        }
        order_.push_back(p.segment_id);
    }
    versions_.push_back(std::move(v0));
}

VersionStore VersionStore::create(const std::filesystem::path& root, std::string character,
                                  const std::vector<dsl::Program>& initial) {
    VersionStore s(std::move(character), initial);
    s.dir_ = root / slugify(s.character_);
    std::filesystem::remove_all(s.dir_);
    std::filesystem::create_directories(s.dir_);
    s.write_version(0, s.versions_[0]);
    write_text_file(s.dir_ / "revisions.jsonl", "");
    s.write_meta();
    return s;
}

VersionStore VersionStore::open(const std::filesystem::path& root, const std::string& character) {
    const auto dir = root / slugify(character);
    if (!std::filesystem::exists(dir / "store.json")) throw std::runtime_error("no profile store at " + dir.string());
    const auto meta = nlohmann::json::parse(read_text_file(dir / "store.json"));
    VersionStore s;
    s.dir_ = dir;
    s.character_ = meta.at("character").get<std::string>();
    s.order_ = meta.at("segments").get<std::vector<std::string>>();
    Snapshot v0;
    for (const auto& id : s.order_) {
        const auto path = dir / "v0" / (id + ".cpl");
        v0[id] = canonical(read_text_file(path), id);
    }
    s.versions_.push_back(std::move(v0));
    const auto log = read_text_file(dir / "revisions.jsonl");
    std::size_t pos = 0;
    while (pos < log.size()) {
        auto nl = log.find('\n', pos);
        if (nl == std::string::npos) nl = log.size();
        const auto line = trim(std::string_view(log).substr(pos, nl - pos));
        pos = nl + 1;
        if (line.empty()) continue;
        auto rev = revision_from_json(nlohmann::json::parse(line));
        if (rev.version != static_cast<int>(s.versions_.size())) throw std::runtime_error("revision log out of order in " + dir.string());
        Snapshot next = s.versions_.back();
        next.at(rev.blamed_segment) = rev.new_source;
        s.versions_.push_back(std::move(next));
        s.revisions_.push_back(std::move(rev));
    }
    if (meta.value("head", 0) != s.head()) throw std::runtime_error("store.json head disagrees with revisions.jsonl");
    return s;
}

int VersionStore::head() const {
    std::shared_lock lock(*mutex_);
    return static_cast<int>(versions_.size()) - 1;
}

Snapshot VersionStore::snapshot(int version) const {
    std::shared_lock lock(*mutex_);
    if (version < 0 || version >= static_cast<int>(versions_.size())) {
        throw std::out_of_range("no version " + std::to_string(version) + " for " + character_);
    }
    return versions_[static_cast<std::size_t>(version)];
}

std::vector<dsl::Program> VersionStore::programs(int version) const {
    const auto snap = snapshot(version);
    std::vector<dsl::Program> out;
    for (const auto& id : order_) out.push_back(dsl::parse_or_throw(snap.at(id), id));
    return out;
}

std::vector<Revision> VersionStore::revisions() const {
    std::shared_lock lock(*mutex_);
    return revisions_;
}

Revision VersionStore::commit(Revision rev) {
    std::unique_lock lock(*mutex_);
    const auto& current = versions_.back();
    auto it = current.find(rev.blamed_segment);
    if (it == current.end()) throw std::invalid_argument("unknown segment " + rev.blamed_segment);
    auto parsed = dsl::parse(rev.new_source, rev.blamed_segment);
    if (!parsed.ok()) throw std::invalid_argument("revised source does not parse:\n" + dsl::render(parsed.errors()));
    rev.new_source = dsl::format(parsed.program());
    rev.old_source = it->second;
    if (rev.new_source == rev.old_source) throw std::invalid_argument("revision leaves " + rev.blamed_segment + " unchanged");
    rev.version = static_cast<int>(versions_.size());
    Snapshot next = current;
    next[rev.blamed_segment] = rev.new_source;
    versions_.push_back(next);
    revisions_.push_back(rev);
    if (!dir_.empty()) {
        write_version(rev.version, next);
        std::string log;
        for (const auto& r : revisions_) log += to_json(r).dump() + "\n";
        write_text_file(dir_ / "revisions.jsonl", log);
        write_meta();
    }
    return rev;
}

std::vector<Snapshot> VersionStore::replay() const {
    std::shared_lock lock(*mutex_);
    std::vector<Snapshot> out{versions_.front()};
    for (const auto& r : revisions_) {
        Snapshot next = out.back();
        next.at(r.blamed_segment) = r.new_source;
        out.push_back(std::move(next));
    }
    return out;
}

void VersionStore::write_version(int version, const Snapshot& snap) const {
    const auto vdir = dir_ / ("v" + std::to_string(version));
    std::filesystem::create_directories(vdir);
    for (const auto& [id, src] : snap) write_text_file(vdir / (id + ".cpl"), src);
}

void VersionStore::write_meta() const {
    nlohmann::ordered_json j;
    j["character"] = character_;
    j["segments"] = order_;
    j["head"] = static_cast<int>(versions_.size()) - 1;
    write_text_file(dir_ / "store.json", j.dump(2) + "\n");
}

}  // namespace cprofile::evolver
