#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "corpus.hpp"
#include "model_gen.hpp"
#include "modat/validator.hpp"

using namespace modat;

namespace {

Model stamp() { return testcorpus::load_model(testcorpus::root() / "stamp.modat"); }

std::string dump(const Diagnostics& d) {
    std::string s;
    for (const auto& x : d) s += render_diagnostic(x) + "\n";
    return s;
}

// Replaces one identifier occurrence by another identifier of the same text.
std::string swap_identifier(const std::string& text, std::mt19937_64& rng) {
    static const std::regex ident(R"([A-Za-z_][A-Za-z0-9_]*)");
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::vector<std::string> words;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), ident); it != std::sregex_iterator(); ++it) {
        spans.emplace_back(static_cast<std::size_t>(it->position()), static_cast<std::size_t>(it->length()));
        words.push_back(it->str());
    }
    auto [pos, len] = spans[rng() % spans.size()];
    std::string out = text;
    out.replace(pos, len, words[rng() % words.size()]);
    return out;
}

}  // namespace

TEST(Validate, CorpusModelsAreClean) {
    for (const auto& cm : testcorpus::models()) {
        Diagnostics d = validate(testcorpus::load_model(cm.model));
        EXPECT_TRUE(d.empty()) << cm.name << "\n" << dump(d);
    }
}

TEST(Validate, VariantOfVariantGivesOneE001) {
    Model m = testcorpus::load_model(testcorpus::root() / "bad_depth.modat");
    Diagnostics d = validate(m);
    ASSERT_EQ(d.size(), 1u) << dump(d);
    EXPECT_EQ(d[0].code, "E001");
    EXPECT_EQ(d[0].severity, Severity::Error);

    Diagnostics relaxed = validate(m, ValidateOptions{true});
    ASSERT_EQ(relaxed.size(), 1u);
    EXPECT_EQ(relaxed[0].severity, Severity::Warning);
    EXPECT_FALSE(has_errors(relaxed));
}

TEST(Validate, SingleFaultMutantsGiveExactlyTheirCode) {
    auto faults = testcorpus::faults();
    ASSERT_GE(faults.size(), 10u);
    std::set<std::string> covered;
    for (const auto& f : faults) {
        Diagnostics d = validate(testcorpus::load_model(f.file));
        ASSERT_EQ(d.size(), 1u) << f.file << "\n" << dump(d);
        EXPECT_EQ(d[0].code, f.expected) << f.file;
        EXPECT_EQ(d[0].severity, Severity::Error);
        covered.insert(f.expected);
    }
    EXPECT_EQ(covered, (std::set<std::string>{"E001", "E002", "E003", "E004", "E005", "E006", "E007", "E008"}));
}

TEST(Validate, TwoLevelsDownIsE005) {
    Model m = testcorpus::load_model(testcorpus::root() / "faults" / "e005_two_levels_down.modat");
    Diagnostics d = validate(m);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].code, "E005");
    EXPECT_NE(d[0].message.find("stampCylinder.valveExtend"), std::string::npos) << d[0].message;
}

TEST(CheckRule, CleanCorpusHasNoE001) { EXPECT_TRUE(check_rule(stamp(), "E001").empty()); }

TEST(CheckRule, ForeignConditionOperandIsE006) {
    Model m = testcorpus::load_model(testcorpus::root() / "faults" / "e006_foreign_operand.modat");
    EXPECT_EQ(check_rule(m, "E006").size(), 1u);
    EXPECT_TRUE(check_rule(m, "E004").empty());
}

TEST(CheckRule, UnknownRuleThrows) { EXPECT_THROW(check_rule(stamp(), "E999"), UnknownRule); }

TEST(CheckRule, RuleListIsStable) {
    std::vector<std::string> ids;
    for (const auto& r : all_rules()) ids.emplace_back(r.code);
    EXPECT_EQ(ids, (std::vector<std::string>{"E001", "E002", "E003", "E004", "E005", "E006", "E007", "E008",
                                             "W001", "W002"}));
}

TEST(CheckRule, ValidateIsTheSortedUnionOfRules) {
    std::vector<std::string> sources;
    for (const auto& cm : testcorpus::models()) sources.push_back(testcorpus::read_text(cm.model));
    std::mt19937_64 rng(2024);
    int checked = 0, withDiagnostics = 0;
    for (int attempt = 0; checked < 200 && attempt < 20000; ++attempt) {
        std::string text = sources[static_cast<std::size_t>(attempt) % sources.size()];
        for (int k = static_cast<int>(rng() % 3); k >= 0; --k) text = swap_identifier(text, rng);
        auto parsed = parse_model(text, "mutant.modat");
        if (!parsed.model || has_errors(parsed.diagnostics)) continue;
        ++checked;
        Diagnostics all = validate(*parsed.model);
        Diagnostics merged;
        for (const auto& r : all_rules()) {
            auto part = check_rule(*parsed.model, r.code);
            for (const auto& d : part) EXPECT_EQ(d.code, r.code);
            merged.insert(merged.end(), part.begin(), part.end());
        }
        sort_diagnostics(merged);
        EXPECT_EQ(all, merged) << text;
        if (!all.empty()) ++withDiagnostics;
    }
    EXPECT_EQ(checked, 200);
    EXPECT_GT(withDiagnostics, 50);
}

TEST(Validate, AddingAnUnusedBlockIntroducesNothing) {
    std::vector<Model> models;
    for (const auto& cm : testcorpus::models()) models.push_back(testcorpus::load_model(cm.model));
    for (std::uint64_t seed = 1; seed <= 20; ++seed) models.push_back(testgen::random_model(seed));
    for (const auto& m : models) {
        ASSERT_TRUE(validate(m).empty());
        for (const auto& b : m.blocks) {
            Model grown = m;
            BlockDef copy = b;
            copy.name = "Unused" + b.name;
            grown.blocks.push_back(copy);
            EXPECT_TRUE(validate(grown).empty()) << copy.name << "\n" << dump(validate(grown));
        }
    }
}

TEST(Validate, DeterministicAndTotallyOrdered) {
    for (const auto& f : testcorpus::faults()) {
        Model m = testcorpus::load_model(f.file);
        EXPECT_EQ(validate(m), validate(m));
    }
    // Several diagnostics from one model come out in (file, line, column, code) order.
    std::string text = testcorpus::read_text(testcorpus::root() / "stamp.modat");
    text = std::regex_replace(text, std::regex("lanes valveExtend, valveRetract\n"), "lanes valveExtend\n");
    auto parsed = parse_model(text, "multi.modat");
    ASSERT_TRUE(parsed.model.has_value());
    Diagnostics d = validate(*parsed.model);
    ASSERT_GE(d.size(), 2u) << dump(d);
    for (std::size_t i = 1; i < d.size(); ++i) {
        auto key = [](const Diagnostic& x) { return std::tie(x.span.file, x.span.startLine, x.span.startCol, x.code); };
        EXPECT_LE(key(d[i - 1]), key(d[i]));
    }
}
