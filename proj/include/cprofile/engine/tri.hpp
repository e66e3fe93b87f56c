#pragma once

#include <optional>
#include <string_view>

namespace cprofile::engine {

/// Kleene three-valued truth.
enum class Tri { True, False, Unknown };

constexpr Tri kleene_not(Tri a) {
    switch (a) {
        case Tri::True: return Tri::False;
        case Tri::False: return Tri::True;
        case Tri::Unknown: return Tri::Unknown;
    }
    return Tri::Unknown;
}

constexpr Tri kleene_and(Tri a, Tri b) {
    if (a == Tri::False || b == Tri::False) return Tri::False;
    if (a == Tri::True && b == Tri::True) return Tri::True;
    return Tri::Unknown;
}

constexpr Tri kleene_or(Tri a, Tri b) {
    if (a == Tri::True || b == Tri::True) return Tri::True;
    if (a == Tri::False && b == Tri::False) return Tri::False;
    return Tri::Unknown;
}

constexpr Tri from_bool(bool v) { return v ? Tri::True : Tri::False; }

constexpr std::string_view to_string(Tri t) {
    switch (t) {
        case Tri::True: return "true";
        case Tri::False: return "false";
        case Tri::Unknown: return "unknown";
    }
    return "unknown";
}

/// Verbalizer label for a verdict: yes / no / unknown.
constexpr std::string_view to_label(Tri t) {
    switch (t) {
        case Tri::True: return "yes";
        case Tri::False: return "no";
        case Tri::Unknown: return "unknown";
    }
    return "unknown";
}

/// Accepts yes/no/unknown and true/false (case-sensitive, lowercase).
std::optional<Tri> tri_from_label(std::string_view label);

}  // namespace cprofile::engine
