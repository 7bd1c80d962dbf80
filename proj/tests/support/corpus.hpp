#pragma once

// Locations and loaders for the committed corpus.

#include <filesystem>
#include <string>
#include <vector>

#include "modat/model.hpp"
#include "modat/parser.hpp"

namespace testcorpus {

std::filesystem::path root();  // the corpus/ directory

std::string read_text(const std::filesystem::path& p);

/// Parses a corpus model; throws std::runtime_error with the diagnostics on
/// any error.
modat::Model load_model(const std::filesystem::path& p);
modat::Scenario load_scenario(const std::filesystem::path& p, const modat::Model& model);

struct CorpusModel {
    std::string name;
    std::filesystem::path model;
    std::vector<std::filesystem::path> scenarios;
};

/// corpus/stamp.modat followed by corpus/models/*.modat, each with its
/// scenarios/<name>_*.scn files (stamp also gets extend40.scn).
std::vector<CorpusModel> models();

/// corpus/faults/*.modat with the code from their `// expect: EXXX` line.
struct Fault {
    std::filesystem::path file;
    std::string expected;
};
std::vector<Fault> faults();

}  // namespace testcorpus
