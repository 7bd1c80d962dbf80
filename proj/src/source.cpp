#include "modat/source.hpp"

#include <algorithm>
#include <tuple>

#include <nlohmann/json.hpp>

namespace modat {

bool has_errors(const Diagnostics& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

void sort_diagnostics(Diagnostics& diags) {
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.span.file, a.span.startLine, a.span.startCol, a.code, a.message) <
               std::tie(b.span.file, b.span.startLine, b.span.startCol, b.code, b.message);
    });
}

static std::string_view severity_name(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

std::string render_diagnostic(const Diagnostic& d) {
    return d.span.file + ":" + std::to_string(d.span.startLine) + ":" +
           std::to_string(d.span.startCol) + ": " + std::string(severity_name(d.severity)) + "[" +
           d.code + "]: " + d.message;
}

std::string render_diagnostic_json(const Diagnostic& d) {
    nlohmann::ordered_json j;
    j["file"] = d.span.file;
    j["line"] = d.span.startLine;
    j["col"] = d.span.startCol;
    j["endLine"] = d.span.endLine;
    j["endCol"] = d.span.endCol;
    j["severity"] = severity_name(d.severity);
    j["code"] = d.code;
    j["message"] = d.message;
    return j.dump();
}

}  // namespace modat
