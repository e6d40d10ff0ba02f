#pragma once

#include <string>

#include "kinship/diagnostics.hpp"

namespace kinship {

enum class Sex { Female, Male };

inline char sex_code(Sex s) { return s == Sex::Female ? 'F' : 'M'; }

inline Sex sex_from_code(const std::string& code) {
    if (code == "F") return Sex::Female;
    if (code == "M") return Sex::Male;
    throw Error("sex must be 'F' or 'M', got '" + code + "'");
}

}  // namespace kinship
