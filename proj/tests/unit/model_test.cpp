#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"

namespace licremedy {
namespace {

TEST(PackageName, NormalizesCaseAndSeparatorRuns) {
  EXPECT_EQ(PackageName("Voxel51_ETA").str(), "voxel51-eta");
  EXPECT_EQ(PackageName("a.-_b"), PackageName("A-B"));
  EXPECT_EQ(PackageName::normalize(PackageName::normalize("Foo__Bar")), PackageName::normalize("Foo__Bar"));
}

TEST(PackageName, EmptyNameRejected) { EXPECT_THROW(PackageName(""), Error); }

TEST(Requirement, BareName) {
  const auto r = Requirement::parse("ndjson");
  EXPECT_EQ(r.name.str(), "ndjson");
  EXPECT_TRUE(r.specifiers.empty());
  EXPECT_FALSE(r.marker.has_value());
}

TEST(Requirement, ExactPin) {
  const auto r = Requirement::parse("voxel51-eta==0.8.1");
  EXPECT_EQ(r.name.str(), "voxel51-eta");
  ASSERT_EQ(r.specifiers.size(), 1u);
  EXPECT_EQ(r.specifiers[0].op(), SpecOp::kEqual);
  EXPECT_EQ(r.specifiers[0].version(), Version::parse("0.8.1"));
}

TEST(Requirement, ExtraMarkerRoundTrip) {
  const auto r = Requirement::parse("patool; extra == 'utils'");
  EXPECT_EQ(r.name.str(), "patool");
  ASSERT_TRUE(r.marker.has_value());
  EXPECT_EQ(r.marker->referenced_extras(), std::set<std::string>{"utils"});
  EXPECT_EQ(Requirement::parse(r.to_string()), r);
  MarkerEnv env;
  EXPECT_FALSE(r.active(env));
  env.extras.insert("utils");
  EXPECT_TRUE(r.active(env));
}

TEST(Requirement, FullSyntaxRoundTrip) {
  for (const char* raw : {"Pillow[extra1,Extra2] (>=6.2.2,<10)", "a>=1.0,!=1.5.*; python_version >= '3.6' and os_name == 'posix'",
                          "b~=2.2; sys_platform in 'linux darwin' or extra == \"x\"", "c===1.0-custom",
                          "d; (python_version < '3' or extra == 'y') and sys_platform != 'win32'"}) {
    const auto r = Requirement::parse(raw);
    EXPECT_EQ(Requirement::parse(r.to_string()), r) << raw;
  }
}

TEST(Requirement, MalformedLinesThrow) {
  for (const char* bad : {"", ">=1.0", "a>=", "a; extra ==", "a @@ 1", "a (>=1.0", "a; bogus_var == '1'"}) {
    EXPECT_THROW(Requirement::parse(bad), MalformedRequirement) << bad;
  }
}

TEST(Specifier, IntervalMembership) {
  const auto specs = parse_specifiers(">=1.0.1,<1.0.3");
  EXPECT_TRUE(constraint_matches(Version::parse("1.0.2"), specs));
  EXPECT_FALSE(constraint_matches(Version::parse("1.0.3"), specs));
}

TEST(Specifier, PrereleasesExcludedByDefault) {
  const auto specs = parse_specifiers(">=1.0");
  EXPECT_FALSE(constraint_matches(Version::parse("2.0.0rc1"), specs));
  EXPECT_TRUE(constraint_matches(Version::parse("2.0.0rc1"), specs, true));
  EXPECT_TRUE(constraint_matches(Version::parse("2.0.0rc1"), parse_specifiers(">=2.0.0rc1")));
}

TEST(Specifier, CompatibleReleaseExpansion) {
  const auto specs = parse_specifiers("~=1.4.2");
  EXPECT_TRUE(constraint_matches(Version::parse("1.4.9"), specs));
  EXPECT_FALSE(constraint_matches(Version::parse("1.5"), specs));
  EXPECT_FALSE(constraint_matches(Version::parse("1.4.1"), specs));
}

TEST(Specifier, ArbitraryEqualityIsRawString) {
  const auto specs = parse_specifiers("===1.0");
  EXPECT_TRUE(constraint_matches(Version::parse("1.0"), specs));
  EXPECT_FALSE(constraint_matches(Version::parse("1.0.0"), specs));
}

TEST(Specifier, LocalSegmentIgnoredForNonArbitraryOperators) {
  EXPECT_TRUE(constraint_matches(Version::parse("1.0+local.1"), parse_specifiers("==1.0")));
  EXPECT_TRUE(constraint_matches(Version::parse("1.0+local.1"), parse_specifiers("<=1.0")));
}

// Expected values come from packaging.specifiers.SpecifierSet.contains.
TEST(Specifier, ReferenceCorpusMatchesPackaging) {
  std::ifstream in(testing::data_path("specifier_corpus.tsv"));
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string spec, version, with_pre, final_only;
    std::getline(fields, spec, '\t');
    std::getline(fields, version, '\t');
    std::getline(fields, with_pre, '\t');
    std::getline(fields, final_only);
    const auto v = Version::parse(version);
    const auto specs = parse_specifiers(spec);
    EXPECT_EQ(constraint_matches(v, specs, true), with_pre == "1") << spec << " contains " << version;
    EXPECT_EQ(constraint_matches(v, specs), final_only == "1") << spec << " contains final " << version;
    ++rows;
  }
  EXPECT_EQ(rows, 300);
}

TEST(Timestamp, ParsesOffsetsAndFractions) {
  EXPECT_EQ(Timestamp::parse("2022-11-10T18:32:11Z").to_iso(), "2022-11-10T18:32:11Z");
  EXPECT_EQ(Timestamp::parse("2022-11-10T20:32:11+02:00"), Timestamp::parse("2022-11-10T18:32:11Z"));
  EXPECT_EQ(Timestamp::parse("2022-11-10 18:32:11.123456").to_iso(), "2022-11-10T18:32:11.123Z");
  EXPECT_EQ(Timestamp::parse("2022-11-10").to_iso(), "2022-11-10T00:00:00Z");
  EXPECT_EQ(Timestamp::parse("1970-01-01T00:00:01Z").millis, 1000);
  EXPECT_EQ(Timestamp::parse("2022-11-10T18:32:11Z").year(), 2022);
  EXPECT_THROW(Timestamp::parse("yesterday"), MalformedTimestamp);
  EXPECT_THROW(Timestamp::parse("2022-13-01"), MalformedTimestamp);
}

TEST(Marker, EitherIsLogicalOr) {
  const auto a = Marker::parse("extra == 'x'");
  const auto b = Marker::parse("python_version < '3'");
  const auto m = Marker::either(a, b);
  MarkerEnv env;
  EXPECT_FALSE(m.evaluate(env));
  env.extras.insert("x");
  EXPECT_TRUE(m.evaluate(env));
}

TEST(Marker, VersionComparisonUsesVersionOrder) {
  MarkerEnv env;
  EXPECT_TRUE(Marker::parse("python_version >= '3.8'").evaluate(env));
  EXPECT_FALSE(Marker::parse("python_version < '3.9'").evaluate(env));
  EXPECT_TRUE(Marker::parse("'linux' in sys_platform").evaluate(env));
  EXPECT_TRUE(Marker::parse("os_name not in 'nt java'").evaluate(env));
}

}  // namespace
}  // namespace licremedy
