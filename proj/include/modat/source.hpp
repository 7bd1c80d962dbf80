#pragma once

#include <string>
#include <vector>

namespace modat {

struct SourceSpan {
    std::string file;
    int startLine = 1;
    int startCol = 1;
    int endLine = 1;
    int endCol = 1;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    SourceSpan span;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);

/// Total order: file, line, column, code, message.
void sort_diagnostics(Diagnostics& diags);

/// `file:line:col: severity[code]: message`
std::string render_diagnostic(const Diagnostic& d);

/// One JSON object per diagnostic.
std::string render_diagnostic_json(const Diagnostic& d);

}  // namespace modat
