#include "cprofile/llm/template.hpp"

#include <algorithm>

#include "cprofile/util/text.hpp"

namespace cprofile::llm {

namespace detail {
const std::map<std::string, std::string>& builtin_template_texts();
}

namespace {

template <class Fn>
void scan(const std::string& text, Fn&& on_placeholder, std::string* out) {
    std::size_t i = 0;
    while (i < text.size()) {
        const auto open = text.find("{{", i);
        if (open == std::string::npos) break;
        const auto close = text.find("}}", open + 2);
        if (close == std::string::npos) break;
        const std::string name(trim(std::string_view(text).substr(open + 2, close - open - 2)));
        if (out != nullptr) out->append(text, i, open - i);
        on_placeholder(name, out);
        i = close + 2;
    }
    if (out != nullptr) out->append(text, i, std::string::npos);
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
    std::vector<std::string> names;
    scan(text, [&](const std::string& n, std::string*) {
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    }, nullptr);
    return names;
}

std::string PromptTemplate::render(const Bindings& bindings) const {
    for (const auto& n : placeholders()) {
        if (bindings.find(n) == bindings.end()) throw TemplateError("template '" + name + "' has unbound placeholder {{" + n + "}}");
    }
    std::string out;
    scan(text, [&](const std::string& n, std::string* o) { o->append(bindings.at(n)); }, &out);
    return out;
}

TemplateLibrary TemplateLibrary::builtin() {
    TemplateLibrary lib;
    for (const auto& [name, text] : detail::builtin_template_texts()) lib.set({name, text});
    return lib;
}

TemplateLibrary TemplateLibrary::with_overrides(const std::filesystem::path& dir) {
    TemplateLibrary lib = builtin();
    if (dir.empty() || !std::filesystem::is_directory(dir)) return lib;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".txt") lib.set({entry.path().stem().string(), read_text_file(entry.path())});
    }
    return lib;
}

const PromptTemplate& TemplateLibrary::get(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw TemplateError("no prompt template named '" + name + "'");
    return it->second;
}

void TemplateLibrary::set(PromptTemplate tpl) {
    auto name = tpl.name;
    templates_[name] = std::move(tpl);
}

std::vector<std::string> TemplateLibrary::names() const {
    std::vector<std::string> out;
    for (const auto& [n, _] : templates_) out.push_back(n);
    return out;
}

}  // namespace cprofile::llm
