#include "cprofile/engine/tri.hpp"

namespace cprofile::engine {

std::optional<Tri> tri_from_label(std::string_view label) {
    if (label == "yes" || label == "true") return Tri::True;
    if (label == "no" || label == "false") return Tri::False;
    if (label == "unknown") return Tri::Unknown;
    return std::nullopt;
}

}  // namespace cprofile::engine
