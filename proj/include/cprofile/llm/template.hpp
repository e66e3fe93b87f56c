#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cprofile::llm {

using Bindings = std::map<std::string, std::string>;

/// Rendering was attempted with a placeholder left unbound.
class TemplateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Prompt text with `{{name}}` placeholders.
struct PromptTemplate {
    std::string name;
    std::string text;

    /// Distinct placeholder names in order of first appearance.
    std::vector<std::string> placeholders() const;

    /// Single-pass substitution; bound values are not rescanned. Throws TemplateError.
    std::string render(const Bindings& bindings) const;
};

/**
 * Named templates: role_play, cot, codify, blame, revise, nli, preference,
 * condition, scene_extract, guiding_question, spoiler_filter.
 *
 * The built-in set is embedded from data/templates at build time; a directory
 * of `<name>.txt` files overrides individual entries.
 */
class TemplateLibrary {
public:
    static TemplateLibrary builtin();
    static TemplateLibrary with_overrides(const std::filesystem::path& dir);

    const PromptTemplate& get(const std::string& name) const;
    void set(PromptTemplate tpl);
    std::vector<std::string> names() const;

private:
    std::map<std::string, PromptTemplate> templates_;
};

}  // namespace cprofile::llm
