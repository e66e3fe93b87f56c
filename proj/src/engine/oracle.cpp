#include "cprofile/engine/oracle.hpp"

namespace cprofile::engine {

std::string_view to_string(OracleSource source) {
    switch (source) {
        case OracleSource::Llm: return "llm";
        case OracleSource::Table: return "table";
        case OracleSource::Remote: return "remote";
    }
    return "table";
}

std::optional<ConditionVerdict> OracleCache::find(const std::string& scene_id, const std::string& question) const {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find({scene_id, question}); it != entries_.end()) return it->second;
    return std::nullopt;
}

ConditionVerdict OracleCache::commit(const std::string& scene_id, const std::string& question, ConditionVerdict verdict) {
    std::lock_guard lock(mutex_);
    return entries_.try_emplace({scene_id, question}, std::move(verdict)).first->second;
}

std::size_t OracleCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

}  // namespace cprofile::engine
