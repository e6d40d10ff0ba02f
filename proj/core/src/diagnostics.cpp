#include "kinship/diagnostics.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace kinship {

std::string format_diagnostic(const Diagnostic& d) {
    std::ostringstream os;
    os << d.line << ':' << d.column << ": "
       << (d.severity == Severity::Error ? "error" : "warning") << ' ' << d.code
       << ": " << d.message;
    return os.str();
}

void sort_diagnostics(std::vector<Diagnostic>& ds) {
    std::stable_sort(ds.begin(), ds.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.line, a.column, a.code) < std::tie(b.line, b.column, b.code);
    });
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& d) {
    return os << format_diagnostic(d);
}

}  // namespace kinship
