#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"

namespace licremedy {
namespace {

using testing::data_path;

struct CorpusRow {
  int rank;
  bool prerelease;
  std::string normalized;
  std::string input;
};

std::vector<CorpusRow> load_corpus() {
  std::ifstream in(data_path("pep440_corpus.tsv"));
  std::vector<CorpusRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    CorpusRow row;
    std::string rank, pre;
    std::getline(fields, rank, '\t');
    std::getline(fields, pre, '\t');
    std::getline(fields, row.normalized, '\t');
    std::getline(fields, row.input);
    row.rank = std::stoi(rank);
    row.prerelease = pre == "1";
    rows.push_back(row);
  }
  return rows;
}

TEST(Version, ReferenceCorpusHasTwoHundredStrings) { EXPECT_EQ(load_corpus().size(), 200u); }

TEST(Version, ReferenceCorpusOrderMatchesPackaging) {
  const auto rows = load_corpus();
  std::vector<Version> parsed;
  for (const auto& r : rows) {
    const auto v = Version::try_parse(r.input);
    ASSERT_TRUE(v.has_value()) << r.input;
    parsed.push_back(*v);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto expected = rows[i].rank <=> rows[j].rank;
      ASSERT_EQ(parsed[i] <=> parsed[j], expected) << rows[i].input << " vs " << rows[j].input;
    }
  }
}

TEST(Version, ReferenceCorpusNormalizationAndPrerelease) {
  for (const auto& r : load_corpus()) {
    const auto v = Version::parse(r.input);
    EXPECT_EQ(v.to_string(), r.normalized) << r.input;
    EXPECT_EQ(v.is_prerelease(), r.prerelease) << r.input;
    EXPECT_EQ(v.raw(), r.input);
  }
}

TEST(Version, ZeroPaddingCompareEqual) {
  EXPECT_EQ(Version::parse("1.0"), Version::parse("1.0.0"));
  EXPECT_EQ(Version::parse("1.0").raw(), "1.0");
}

TEST(Version, ReleaseTupleOrder) {
  EXPECT_LT(Version::parse("1.6.0"), Version::parse("1.6.1"));
  EXPECT_LT(Version::parse("1.6.1"), Version::parse("1.6.2"));
  EXPECT_LT(Version::parse("1.9"), Version::parse("1.10"));
}

TEST(Version, ReleaseCandidateBeforeFinal) { EXPECT_LT(Version::parse("2.0.0rc1"), Version::parse("2.0.0")); }

TEST(Version, DevBeforePreBeforeFinalBeforePost) {
  const std::vector<std::string> chain{"1.0.dev1", "1.0a1.dev1", "1.0a1", "1.0b1", "1.0rc1", "1.0", "1.0+abc",
                                       "1.0.post1.dev1", "1.0.post1", "1.1.dev0"};
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    EXPECT_LT(Version::parse(chain[i]), Version::parse(chain[i + 1])) << chain[i];
  }
}

TEST(Version, EpochDominates) { EXPECT_LT(Version::parse("9999.0"), Version::parse("1!0.1")); }

TEST(Version, LocalSegmentsNumericAboveAlphanumeric) {
  EXPECT_LT(Version::parse("1.0+abc"), Version::parse("1.0+5"));
  EXPECT_LT(Version::parse("1.0+abc"), Version::parse("1.0+abc.1"));
}

TEST(Version, MalformedStringsThrow) {
  for (const char* bad : {"", "abc", "1..0", "1.0-", "1.0+", "1.0++x", "1!", "!1.0", "1.0 beta x"}) {
    EXPECT_THROW(Version::parse(bad), MalformedVersion) << bad;
    EXPECT_FALSE(Version::try_parse(bad).has_value()) << bad;
  }
}

TEST(Version, PublicAndBaseVersion) {
  const auto v = Version::parse("1!2.3rc1.post2.dev3+local.7");
  EXPECT_EQ(v.public_version().to_string(), "1!2.3rc1.post2.dev3");
  EXPECT_EQ(v.base_version().to_string(), "1!2.3");
  EXPECT_EQ(v.epoch(), 1u);
  ASSERT_TRUE(v.pre().has_value());
  EXPECT_EQ(v.pre()->tag, Version::PreTag::kRc);
}

}  // namespace
}  // namespace licremedy
