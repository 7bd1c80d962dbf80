// modat-lc: command-line driver for checking, simulating, generating,
// rebasing, formatting and sizing modat models.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "modat/codegen.hpp"
#include "modat/formatter.hpp"
#include "modat/parser.hpp"
#include "modat/simulator.hpp"
#include "modat/stats.hpp"
#include "modat/text_diff.hpp"
#include "modat/validator.hpp"
#include "modat/variant_ops.hpp"
#include "modat/version.hpp"

namespace {

using namespace modat;

enum Exit : int { kOk = 0, kInvalid = 1, kParse = 2, kSimFail = 3, kUsage = 4 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    bool json = false;
    bool allowDeep = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw UsageError("cannot write '" + path + "'");
}

void report(const Diagnostics& diags, const Common& c) {
    for (const auto& d : diags) {
        std::cerr << (c.json ? render_diagnostic_json(d) : render_diagnostic(d)) << '\n';
    }
}

/// parse -> resolve -> validate. Returns the model or the exit code to use.
std::variant<Model, int> load_pipeline(const std::string& path, const Common& c, bool validateModel = true) {
    ModelParseResult parsed = parse_model(read_file(path), path);
    if (!parsed.model || has_errors(parsed.diagnostics)) {
        report(parsed.diagnostics, c);
        return kParse;
    }
    Diagnostics diags = parsed.diagnostics;
    if (validateModel) {
        Diagnostics v = validate(*parsed.model, ValidateOptions{c.allowDeep});
        diags.insert(diags.end(), v.begin(), v.end());
    }
    report(diags, c);
    if (has_errors(diags)) return kInvalid;
    return std::move(*parsed.model);
}

int cmd_check(const std::string& path, const Common& c) {
    auto loaded = load_pipeline(path, c);
    return std::holds_alternative<int>(loaded) ? std::get<int>(loaded) : kOk;
}

int cmd_sim(const std::string& modelPath, const std::string& scenarioPath, const std::string& tracePath,
            const Common& c) {
    auto loaded = load_pipeline(modelPath, c);
    if (std::holds_alternative<int>(loaded)) return std::get<int>(loaded);
    const Model& model = std::get<Model>(loaded);
    ScenarioParseResult sc = parse_scenario(read_file(scenarioPath), model, scenarioPath);
    report(sc.diagnostics, c);
    if (!sc.scenario || has_errors(sc.diagnostics)) return kParse;

    Trace trace;
    try {
        trace = run(model, *sc.scenario);
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kSimFail;
    }
    if (!tracePath.empty()) write_file(tracePath, trace_to_jsonl(trace));

    for (const auto& a : trace.assertions) {
        std::cout << (a.passed ? "PASS" : "FAIL") << " cycle " << a.cycle << ' '
                  << (a.expected ? "expect " : "forbid ") << a.expr << (a.reached ? "" : " (not reached)") << '\n';
    }
    if (trace.diverged) {
        std::cerr << "no completion within " << sc.scenario->maxCycles << " cycles\n";
    }
    std::cout << (trace.ok() ? "PASS " : "FAIL ") << trace.passed() << '/' << trace.assertions.size()
              << " assertions\n";
    return trace.ok() ? kOk : kSimFail;
}

int cmd_gen(const std::string& path, const std::string& outPath, bool oop, const Common& c) {
    auto loaded = load_pipeline(path, c);
    if (std::holds_alternative<int>(loaded)) return std::get<int>(loaded);
    CodegenOptions options;
    options.oop = oop;
    options.allowDeepInheritance = c.allowDeep;
    std::string text = generate_st(std::get<Model>(loaded), options).text();
    if (outPath.empty()) {
        std::cout << text;
    } else {
        write_file(outPath, text);
    }
    return kOk;
}

int cmd_rebase(const std::string& path, const std::string& oldBase, const std::string& variant,
               const std::string& outPath, const std::string& demoted, const Common& c) {
    auto loaded = load_pipeline(path, c);
    if (std::holds_alternative<int>(loaded)) return std::get<int>(loaded);
    const Model& model = std::get<Model>(loaded);
    RebaseOptions options;
    if (!demoted.empty()) options.demotedName = demoted;
    Model result;
    try {
        result = rebase(model, oldBase, variant, options);
    } catch (const ModelError& e) {
        std::cerr << "rebase failed (" << to_string(e.code()) << "): " << e.what() << '\n';
        switch (e.code()) {
            case ModelErrorCode::UnknownBlock:
            case ModelErrorCode::NotAVariant:
            case ModelErrorCode::NotAVariantOf: return kUsage;
            default: return kInvalid;
        }
    }
    Diagnostics after = validate(result, ValidateOptions{c.allowDeep});
    report(after, c);
    if (has_errors(after)) return kInvalid;

    std::string text = format_model(result);
    if (outPath.empty()) {
        std::cout << text;
    } else {
        write_file(outPath, text);
        std::cout << unified_diff(format_model(model), text, path, outPath);
    }
    return kOk;
}

int cmd_fmt(const std::string& path, const Common& c) {
    auto loaded = load_pipeline(path, c, false);
    if (std::holds_alternative<int>(loaded)) return std::get<int>(loaded);
    std::cout << format_model(std::get<Model>(loaded));
    return kOk;
}

int cmd_stats(const std::string& path, const Common& c) {
    auto loaded = load_pipeline(path, c);
    if (std::holds_alternative<int>(loaded)) return std::get<int>(loaded);
    std::cout << render_stats(compute_stats(std::get<Model>(loaded)));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"modat-lc: modat model checker, simulator and Structured Text generator"};
    app.set_version_flag("--version", "modat-lc " + std::string(kToolVersion) + " (grammar " +
                                          std::string(kGrammarVersion) + ")");
    app.require_subcommand(1);

    Common common;
    app.add_flag("--json", common.json, "Print diagnostics as JSON objects");
    app.add_flag("--allow-deep-inheritance", common.allowDeep, "Report variant-of-variant chains as warnings");

    std::string model, scenario, trace, out, oldBase, variant, demoted;
    bool oop = false;

    auto* check = app.add_subcommand("check", "Parse and validate a model");
    check->add_option("model", model, "Model file")->required();

    auto* sim = app.add_subcommand("sim", "Run a scenario against a model");
    sim->add_option("model", model, "Model file")->required();
    sim->add_option("scenario", scenario, "Scenario file")->required();
    sim->add_option("--trace", trace, "Write the JSON-lines trace to this file");

    auto* gen = app.add_subcommand("gen", "Generate IEC 61131-3 Structured Text");
    gen->add_option("model", model, "Model file")->required();
    gen->add_option("-o,--output", out, "Output file (default: standard output)");
    gen->add_flag("--oop", oop, "Emit EXTENDS/METHOD function blocks");

    auto* rb = app.add_subcommand("rebase", "Promote a variant to the base of its family");
    rb->add_option("model", model, "Model file")->required();
    rb->add_option("oldBase", oldBase, "Current base block")->required();
    rb->add_option("variant", variant, "Variant to promote")->required();
    rb->add_option("-o,--output", out, "Write the model here and print a diff");
    rb->add_option("--demoted-name", demoted, "Name for the demoted old base");

    auto* fmt = app.add_subcommand("fmt", "Print a model in canonical form");
    fmt->add_option("model", model, "Model file")->required();

    auto* stats = app.add_subcommand("stats", "Print size statistics for a model");
    stats->add_option("model", model, "Model file")->required();

    for (auto* sub : {check, sim, gen, rb, fmt, stats}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*check) return cmd_check(model, common);
        if (*sim) return cmd_sim(model, scenario, trace, common);
        if (*gen) return cmd_gen(model, out, oop, common);
        if (*rb) return cmd_rebase(model, oldBase, variant, out, demoted, common);
        if (*fmt) return cmd_fmt(model, common);
        if (*stats) return cmd_stats(model, common);
    } catch (const UsageError& e) {
        std::cerr << "modat-lc: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
