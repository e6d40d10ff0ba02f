#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinship {

enum class Severity { Error, Warning };

// A located validation finding. Everything user-facing (parsers, table and
// pedigree loaders, scenario checks) reports through these rather than
// throwing, so a single run can surface every problem at once.
struct Diagnostic {
    Severity severity = Severity::Error;
    int line = 0;
    int column = 0;
    std::string code;     // stable short identifier, e.g. "E_CPT_NOT_NORMALIZED"
    std::string message;
    std::string file;     // empty means "the file being processed"

    bool is_error() const { return severity == Severity::Error; }
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds)
        if (d.is_error()) return true;
    return false;
}

// Canonical rendering: "line:col: severity CODE: message" (the CLI prefixes
// the file name). Sorted by location then code for stable output.
std::string format_diagnostic(const Diagnostic& d);
void sort_diagnostics(std::vector<Diagnostic>& ds);
std::ostream& operator<<(std::ostream& os, const Diagnostic& d);

// Contract violations (bad arguments, broken preconditions). Distinct from
// Diagnostics: these indicate caller bugs, not bad input files.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// I/O failures (missing file, unreadable stream). The CLI maps these to
// exit code 2, Diagnostic errors to exit code 1.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kinship
