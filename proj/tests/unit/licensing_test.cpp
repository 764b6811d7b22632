#include <gtest/gtest.h>

#include <unistd.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"

namespace licremedy {
namespace {

using nlohmann::json;
using testing::data_path;
using testing::read_file;

const CompatibilityMatrix& M() { return CompatibilityMatrix::builtin(); }
LicenseInfo K(const char* id) { return LicenseInfo::known(id); }

ReleaseRecord rec_with(std::optional<std::string> field, std::vector<std::string> classifiers) {
  ReleaseRecord r;
  r.id = {PackageName("x"), Version::parse("1.0")};
  r.license_field = std::move(field);
  r.classifiers = std::move(classifiers);
  return r;
}

TEST(Matrix, BuiltinHasSixteenLicenses) {
  EXPECT_EQ(M().licenses().size(), 16u);
  for (const char* id : {"MIT", "Apache-2.0", "BSD-2-Clause", "BSD-3-Clause", "GPL-2.0-only", "GPL-2.0-or-later",
                         "GPL-3.0-only", "GPL-3.0-or-later", "LGPL-2.1-only", "LGPL-3.0-only", "AGPL-3.0-only",
                         "MPL-2.0", "EPL-1.0", "Unlicense", "ISC", "Python-2.0"}) {
    EXPECT_TRUE(M().contains(id)) << id;
  }
  EXPECT_FALSE(M().version().empty());
}

TEST(Matrix, GplThreeIntoApacheIncompatible) {
  EXPECT_EQ(is_incompatible(K("GPL-3.0-only"), K("Apache-2.0"), M()), Compatibility::kIncompatible);
}

TEST(Matrix, ApacheAndGplTwoIncompatibleBothWays) {
  EXPECT_EQ(is_incompatible(K("Apache-2.0"), K("GPL-2.0-only"), M()), Compatibility::kIncompatible);
  EXPECT_EQ(is_incompatible(K("GPL-2.0-only"), K("Apache-2.0"), M()), Compatibility::kIncompatible);
}

TEST(Matrix, OneWayRelation) {
  EXPECT_EQ(is_incompatible(K("MIT"), K("GPL-3.0-only"), M()), Compatibility::kCompatible);
  EXPECT_EQ(is_incompatible(K("GPL-3.0-only"), K("MIT"), M()), Compatibility::kIncompatible);
}

TEST(Matrix, SelfCompatible) {
  for (const auto& id : M().licenses()) {
    EXPECT_EQ(is_incompatible(K(id.c_str()), K(id.c_str()), M()), Compatibility::kCompatible) << id;
  }
}

TEST(Matrix, UnrecognizableIsUnknown) {
  EXPECT_EQ(is_incompatible(LicenseInfo::unrecognizable(), K("MIT"), M()), Compatibility::kUnknown);
  EXPECT_EQ(is_incompatible(K("MIT"), LicenseInfo::unrecognizable(), M()), Compatibility::kUnknown);
}

TEST(Matrix, OutOfMatrixThrowsOrFlags) {
  EXPECT_THROW(is_incompatible(K("HPND"), K("MIT"), M()), OutOfMatrix);
  bool flagged = false;
  EXPECT_EQ(check_compatibility(K("HPND"), K("MIT"), M(), &flagged), Compatibility::kUnknown);
  EXPECT_TRUE(flagged);
  EXPECT_THROW(categorize(K("HPND"), M()), OutOfMatrix);
  EXPECT_EQ(category_or_unknown(K("HPND"), M()), LicenseCategory::kUnknown);
}

TEST(Matrix, Categories) {
  EXPECT_EQ(categorize(K("MIT"), M()), LicenseCategory::kPermissive);
  EXPECT_EQ(categorize(K("LGPL-3.0-only"), M()), LicenseCategory::kWeakCopyleft);
  EXPECT_EQ(categorize(K("GPL-3.0-only"), M()), LicenseCategory::kStrongCopyleft);
  EXPECT_EQ(categorize(LicenseInfo::unrecognizable(), M()), LicenseCategory::kUnknown);
}

TEST(Matrix, ShippedDataPassesLints) {
  EXPECT_TRUE(lint_self_compatibility(M()).empty());
  EXPECT_TRUE(lint_permissive_source(M()).empty());
}

TEST(Matrix, LintsCatchBadPairs) {
  const CompatibilityMatrix m({"A", "B"}, {{"A", LicenseCategory::kPermissive}, {"B", LicenseCategory::kStrongCopyleft}},
                              {{"A", "B"}});
  EXPECT_EQ(lint_permissive_source(m), (std::vector<std::pair<SpdxId, SpdxId>>{{"A", "B"}}));
}

TEST(Matrix, ConstructorRejectsInvalidData) {
  using C = LicenseCategory;
  EXPECT_THROW(CompatibilityMatrix({"A"}, {{"A", C::kPermissive}}, {{"A", "A"}}), SchemaViolation);
  EXPECT_THROW(CompatibilityMatrix({"A"}, {{"A", C::kPermissive}}, {{"A", "Z"}}), SchemaViolation);
  EXPECT_THROW(CompatibilityMatrix({"A", "B"}, {{"A", C::kPermissive}}, {}), SchemaViolation);
  EXPECT_THROW(CompatibilityMatrix::from_json(R"({"licenses": ["A"], "categories": {"A": "nope"}, "incompatible": []})"),
               SchemaViolation);
}

TEST(Matrix, LoadsFromFileAndExtends) {
  const auto m = CompatibilityMatrix::from_json(
      R"({"version": "t1", "licenses": ["MIT", "GPL-2.0+"], "categories": {"MIT": "permissive", "GPL-2.0+": "strong"},
          "incompatible": [["GPL-2.0+", "MIT"]]})");
  EXPECT_TRUE(m.contains("GPL-2.0-or-later"));
  EXPECT_TRUE(m.incompatible("GPL-2.0-or-later", "MIT"));
  EXPECT_EQ(m.version(), "t1");
  const auto wider = m.with_pairs({{"MIT", "GPL-2.0-or-later"}});
  EXPECT_TRUE(wider.incompatible("MIT", "GPL-2.0-or-later"));
  EXPECT_FALSE(m.incompatible("MIT", "GPL-2.0-or-later"));
}

TEST(Spdx, CanonicalForms) {
  EXPECT_EQ(canonical_spdx("GPL-2.0"), "GPL-2.0-only");
  EXPECT_EQ(canonical_spdx("GPL-2.0+"), "GPL-2.0-or-later");
  EXPECT_EQ(canonical_spdx("LGPL-2.1"), "LGPL-2.1-only");
  EXPECT_EQ(canonical_spdx("MIT"), "MIT");
  EXPECT_EQ(canonical_spdx("GPL-3.0-only"), "GPL-3.0-only");
  EXPECT_EQ(LicenseInfo::from_string("Unrecognizable"), LicenseInfo::unrecognizable());
}

TEST(Keywords, NormalizedText) {
  EXPECT_EQ(normalize_license_text("GPLv3+"), "gpl v 3 or later");
  EXPECT_EQ(normalize_license_text("Apache-2.0"), "apache 2 0");
}

TEST(Keywords, RuleFiringConditions) {
  KeywordRule rule{"GPL-3.0-or-later", {"gpl"}, {"3"}, {"later"}, {"lesser"}};
  EXPECT_TRUE(rule.score("GNU GPL v3 or later").has_value());
  EXPECT_FALSE(rule.score("GNU GPL v3").has_value());
  EXPECT_FALSE(rule.score("GNU Lesser GPL v3 or later").has_value());
  EXPECT_FALSE(rule.score("GPL").has_value());
  EXPECT_TRUE(rule.score("gpl V3+").has_value());
  EXPECT_FALSE(rule.score("gplish 3 later").has_value());
}

TEST(Normalize, ClassifierStep) {
  const auto r = normalize_license(rec_with("BSD", {"License :: OSI Approved :: MIT License"}), NormalizationTables::builtin());
  EXPECT_EQ(r.license, K("MIT"));
  EXPECT_EQ(r.step, LicenseSource::kClassifier);
}

TEST(Normalize, ApacheTwoWithoutClassifier) {
  const auto r = normalize_license(rec_with("Apache 2", {}), NormalizationTables::builtin());
  EXPECT_EQ(r.license, K("Apache-2.0"));
  EXPECT_TRUE(r.step == LicenseSource::kFieldMap || r.step == LicenseSource::kKeywords);
}

TEST(Normalize, EmptyFieldIsUnrecognizable) {
  const auto r = normalize_license(rec_with("", {}), NormalizationTables::builtin());
  EXPECT_EQ(r.license, LicenseInfo::unrecognizable());
  EXPECT_EQ(r.step, LicenseSource::kFallback);
  EXPECT_EQ(normalize_license(rec_with(std::nullopt, {}), NormalizationTables::builtin()).step, LicenseSource::kFallback);
}

TEST(Normalize, MultipleClassifierLicensesAreUnrecognizable) {
  const auto r = normalize_license(rec_with("MIT", {"License :: OSI Approved :: MIT License",
                                                    "License :: OSI Approved :: Apache Software License"}),
                                   NormalizationTables::builtin());
  EXPECT_EQ(r.license, LicenseInfo::unrecognizable());
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("multi-license"), std::string::npos);
}

TEST(Normalize, CorpusGroundTruthAndPrecedence) {
  const json corpus = json::parse(read_file(data_path("licensing_corpus.json")));
  auto tables = NormalizationTables::builtin();
  tables.field_to_spdx = corpus.at("field_map").get<std::map<std::string, SpdxId>>();
  const std::map<std::string, LicenseSource> steps{{"classifier", LicenseSource::kClassifier},
                                                   {"field", LicenseSource::kFieldMap},
                                                   {"keywords", LicenseSource::kKeywords},
                                                   {"fallback", LicenseSource::kFallback}};
  ASSERT_EQ(corpus.at("records").size(), 100u);
  for (const auto& item : corpus.at("records")) {
    const auto rec = record_from_json(item.at("record").dump());
    const auto r = normalize_license(rec, tables);
    EXPECT_EQ(r.license.to_string(), item.at("expected").get<std::string>()) << item.at("record").dump();
    EXPECT_EQ(r.step, steps.at(item.at("step").get<std::string>())) << item.at("record").dump();
  }
}

TEST(FieldMapping, MostFrequentClassifierWins) {
  std::vector<ReleaseRecord> recs;
  for (int i = 0; i < 3; ++i) recs.push_back(rec_with("Apache v2", {"License :: OSI Approved :: Apache Software License"}));
  recs.push_back(rec_with("Apache v2", {"License :: OSI Approved :: GNU General Public License v3 (GPLv3)"}));
  recs.push_back(rec_with("lonely", {}));
  const auto map = build_field_mapping(recs, builtin_classifier_map());
  EXPECT_EQ(map.at("Apache v2"), "Apache-2.0");
  EXPECT_FALSE(map.count("lonely"));
}

TEST(FieldMapping, TieGoesToSmallerId) {
  std::vector<ReleaseRecord> recs{rec_with("dual", {"License :: OSI Approved :: MIT License"}),
                                  rec_with("dual", {"License :: OSI Approved :: Apache Software License"})};
  EXPECT_EQ(build_field_mapping(recs, builtin_classifier_map()).at("dual"), "Apache-2.0");
}

TEST(FieldMapping, AnnotatorUsesMappingFromIndex) {
  // "Apache" alone never fires a keyword rule; it is learned from fiftyone's classifier.
  const auto& index = testing::fiftyone_index();
  const auto* rec = index.find(testing::fiftyone_root());
  ASSERT_NE(rec, nullptr);
  EXPECT_EQ(rec->license, K("Apache-2.0"));
  const auto* patool = index.find(PackageName("patool"), Version::parse("1.12"));
  EXPECT_EQ(patool->license, K("GPL-3.0-only"));
  const auto* imageio = index.find(PackageName("imageio"), Version::parse("2.22.0"));
  EXPECT_EQ(imageio->license, K("BSD-2-Clause"));
  EXPECT_EQ(imageio->license_source, LicenseSource::kKeywords);
}

class ScriptDetector : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("licremedy-detector-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string script(const std::string& name, const std::string& body) {
    const auto p = dir_ / name;
    std::ofstream(p) << "#!/bin/sh\n" << body << "\n";
    std::filesystem::permissions(p, std::filesystem::perms::owner_all);
    return p.string();
  }

  std::filesystem::path dir_;
};

TEST_F(ScriptDetector, DetectorStepFiresAfterKeywords) {
  auto hook = std::make_shared<DetectorHook>();
  hook->detector = std::make_shared<SubprocessDetector>(script("scan", "echo 'GPL-2.0+'"));
  hook->locate = [&](const ReleaseRecord&) { return std::optional<std::filesystem::path>(dir_); };
  const auto r = normalize_license(rec_with("see LICENSE", {}), NormalizationTables::builtin(), hook.get());
  EXPECT_EQ(r.license, K("GPL-2.0-or-later"));
  EXPECT_EQ(r.step, LicenseSource::kDetector);
  const auto kw = normalize_license(rec_with("MIT", {}), NormalizationTables::builtin(), hook.get());
  EXPECT_EQ(kw.step, LicenseSource::kKeywords);
}

TEST_F(ScriptDetector, FailureDegradesToFallbackWithWarning) {
  auto hook = std::make_shared<DetectorHook>();
  hook->detector = std::make_shared<SubprocessDetector>(script("fail", "exit 3"));
  hook->locate = [&](const ReleaseRecord&) { return std::optional<std::filesystem::path>(dir_); };
  const auto r = normalize_license(rec_with("custom", {}), NormalizationTables::builtin(), hook.get());
  EXPECT_EQ(r.step, LicenseSource::kFallback);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Normalize, Deterministic) {
  const auto tables = NormalizationTables::builtin();
  const auto rec = rec_with("GNU GPL v2 or later", {"Programming Language :: Python"});
  const auto a = normalize_license(rec, tables), b = normalize_license(rec, tables);
  EXPECT_EQ(a.license, b.license);
  EXPECT_EQ(a.step, b.step);
  EXPECT_EQ(a.license, K("GPL-2.0-or-later"));
}

}  // namespace
}  // namespace licremedy
