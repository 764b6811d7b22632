#include "fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace licremedy::testing {

std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(LICREMEDY_TEST_DATA) / name; }

std::filesystem::path golden_path(const std::string& name) {
  return std::filesystem::path(LICREMEDY_TEST_GOLDEN) / name;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ReleaseRecord make_record(const std::string& name, const std::string& version, const std::string& upload,
                          const std::vector<std::string>& requires_dist, const std::string& spdx) {
  ReleaseRecord rec;
  rec.id = {PackageName(name), Version::parse(version)};
  rec.upload_time = Timestamp::parse(upload);
  std::vector<Requirement> reqs;
  for (const auto& r : requires_dist) reqs.push_back(Requirement::parse(r));
  rec.requires_dist = merge_duplicate_requirements(std::move(reqs));
  rec.license = spdx.empty() ? LicenseInfo::unrecognizable() : LicenseInfo::known(spdx);
  rec.license_source = LicenseSource::kPreset;
  if (!spdx.empty()) rec.preset_spdx = spdx;
  return rec;
}

PackageIndex index_of(std::vector<ReleaseRecord> records) { return PackageIndex(std::move(records)); }

std::vector<ReleaseRecord> records_of(const PackageIndex& index) {
  std::vector<ReleaseRecord> out;
  for (const auto& [name, list] : index.packages()) out.insert(out.end(), list.begin(), list.end());
  return out;
}

const PackageIndex& fiftyone_index() {
  static const PackageIndex index = [] {
    LoadOptions options;
    options.annotate = make_license_annotator(NormalizationTables::builtin());
    return load_index(data_path("fiftyone-mini.jsonl"), options).index;
  }();
  return index;
}

ReleaseId fiftyone_root() { return {PackageName("fiftyone"), Version::parse("0.18.0")}; }

Timestamp fiftyone_time() { return Timestamp::parse("2022-11-10T18:32:11Z"); }

std::vector<MigrationRule> fiftyone_migrations() { return load_migration_rules(data_path("fiftyone-migrations.jsonl")); }

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(items.size()) - 1))];
}

std::string day(int n) {
  // 2020-01-01 plus n days, n < 365.
  static const int month_days[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int month = 0;
  while (n >= month_days[month]) n -= month_days[month++];
  char buf[32];
  std::snprintf(buf, sizeof buf, "2020-%02d-%02dT12:00:00Z", month + 1, n + 1);
  return buf;
}

std::string random_specifier(Rng& rng, const std::vector<std::string>& versions) {
  const auto& v = pick(rng, versions);
  switch (uniform(rng, 0, 7)) {
    case 0:
    case 1: return "";
    case 2: return ">=" + v;
    case 3: return "<" + v;
    case 4: return "==" + v;
    case 5: return "!=" + v;
    case 6: return "<=" + v;
    default: {
      const auto& w = pick(rng, versions);
      return ">=" + std::min(v, w) + ",<=" + std::max(v, w);
    }
  }
}

std::vector<std::string> choose_versions(Rng& rng, const std::vector<std::string>& pool, int count) {
  std::vector<std::string> out = pool;
  std::shuffle(out.begin(), out.end(), rng);
  out.resize(static_cast<std::size_t>(count));
  return out;
}

}  // namespace

std::string random_version_string(Rng& rng) {
  std::string s;
  if (chance(rng, 0.05)) s += std::to_string(uniform(rng, 1, 2)) + "!";
  const int parts = uniform(rng, 1, 4);
  for (int i = 0; i < parts; ++i) s += (i ? "." : "") + std::to_string(uniform(rng, 0, 12));
  if (chance(rng, 0.25)) s += pick(rng, std::vector<std::string>{"a", "b", "rc", "alpha", "c", "pre"}) + std::to_string(uniform(rng, 0, 4));
  if (chance(rng, 0.15)) s += ".post" + std::to_string(uniform(rng, 0, 3));
  if (chance(rng, 0.15)) s += ".dev" + std::to_string(uniform(rng, 0, 3));
  if (chance(rng, 0.1)) {
    s += "+";
    const int segs = uniform(rng, 1, 3);
    for (int i = 0; i < segs; ++i) s += (i ? "." : "") + pick(rng, std::vector<std::string>{"abc", "7", "x1", "02", "z"});
  }
  return s;
}

ResolverCase random_resolver_case(Rng& rng, int max_packages, int max_versions) {
  static const std::vector<std::string> pool{"0.9", "1.0", "1.1", "1.2rc1", "1.2", "2.0", "2.1", "3.0"};
  const int n = uniform(rng, 2, max_packages);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));

  std::map<std::string, std::vector<std::string>> versions;
  for (const auto& name : names) versions[name] = choose_versions(rng, pool, uniform(rng, 1, max_versions));

  ResolverCase c;
  for (const auto& name : names) {
    for (const auto& v : versions[name]) {
      std::vector<std::string> reqs;
      const int count = name == names[0] ? uniform(rng, 2, 4) : uniform(rng, 0, 3);
      for (int r = 0; r < count; ++r) {
        std::string target = chance(rng, 0.08) ? "ghost" : pick(rng, names);
        if (target == name && name == names[0]) target = names[1];
        if (target == name && !chance(rng, 0.3)) continue;
        std::string req = target;
        if (chance(rng, 0.1)) req += "[extra1]";
        if (target != "ghost") req += random_specifier(rng, versions[target]);
        const int marker = uniform(rng, 0, 19);
        if (marker < 3) req += "; extra == 'feat'";
        else if (marker == 3) req += "; python_version < '3'";
        else if (marker == 4) req += "; sys_platform == 'linux'";
        reqs.push_back(req);
      }
      c.records.push_back(make_record(name, v, day(uniform(rng, 0, chance(rng, 0.8) ? 150 : 364)), reqs, "MIT"));
    }
  }
  const auto& root_versions = versions[names[0]];
  c.root = {PackageName(names[0]), Version::parse(pick(rng, root_versions))};
  c.at = Timestamp::parse(day(uniform(rng, 150, 364)));
  if (chance(rng, 0.5)) c.env.extras.insert("feat");
  return c;
}

CompatibilityMatrix random_matrix(Rng& rng, const std::vector<SpdxId>& licenses, double density) {
  std::set<SpdxId> ids(licenses.begin(), licenses.end());
  std::map<SpdxId, LicenseCategory> categories;
  for (const auto& id : licenses) categories[id] = LicenseCategory::kStrongCopyleft;
  std::set<std::pair<SpdxId, SpdxId>> pairs;
  for (const auto& a : licenses) {
    for (const auto& b : licenses) {
      if (a != b && chance(rng, density)) pairs.emplace(a, b);
    }
  }
  return CompatibilityMatrix(ids, categories, pairs, "random");
}

SolverCase random_solver_case(Rng& rng, int max_packages, int max_versions) {
  static const std::vector<std::string> pool{"1.0", "1.1", "2.0", "2.1", "3.0"};
  static const std::vector<SpdxId> licenses{"MIT", "Apache-2.0", "GPL-2.0-only", "GPL-3.0-only", "LGPL-3.0-only"};
  const int n = uniform(rng, 2, max_packages);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)) + "pkg");

  std::map<std::string, std::vector<std::string>> versions;
  versions[names[0]] = {"1.0"};
  for (int i = 1; i < n; ++i) versions[names[static_cast<std::size_t>(i)]] = choose_versions(rng, pool, uniform(rng, 1, max_versions));

  SolverCase c;
  c.matrix = random_matrix(rng, licenses, 0.3);
  const SpdxId root_license = pick(rng, licenses);
  c.records.push_back([&] {
    std::vector<std::string> reqs;
    std::vector<std::string> others(names.begin() + 1, names.end());
    std::shuffle(others.begin(), others.end(), rng);
    const int count = uniform(rng, 1, std::min<int>(3, static_cast<int>(others.size())));
    for (int r = 0; r < count; ++r) {
      const auto& t = others[static_cast<std::size_t>(r)];
      reqs.push_back(t + random_specifier(rng, versions[t]));
    }
    return make_record(names[0], "1.0", "2020-01-01T00:00:00Z", reqs, root_license);
  }());
  for (int i = 1; i < n; ++i) {
    const auto& name = names[static_cast<std::size_t>(i)];
    for (const auto& v : versions[name]) {
      std::vector<std::string> reqs;
      const int count = uniform(rng, 0, 2);
      for (int r = 0; r < count; ++r) {
        const auto& t = pick(rng, names);
        if (t == name) continue;
        reqs.push_back(t + random_specifier(rng, versions[t]));
      }
      const SpdxId lic = chance(rng, 0.1) ? SpdxId{} : pick(rng, licenses);
      c.records.push_back(make_record(name, v, day(uniform(rng, 0, 300)), reqs, lic));
    }
  }
  c.root = {PackageName(names[0]), Version::parse("1.0")};
  if (n > 2) {
    const int rules = uniform(rng, 0, 2);
    for (int r = 0; r < rules; ++r) {
      const auto& s = names[static_cast<std::size_t>(uniform(rng, 1, n - 1))];
      const auto& t = names[static_cast<std::size_t>(uniform(rng, 1, n - 1))];
      if (s == t) continue;
      MigrationRule rule{PackageName(s), PackageName(t)};
      if (std::find(c.migrations.begin(), c.migrations.end(), rule) == c.migrations.end()) c.migrations.push_back(rule);
    }
  }
  if (chance(rng, 0.5)) {
    c.cost.c_migration = uniform(rng, 1, 20);
    c.cost.c_removal = uniform(rng, static_cast<int>(c.cost.c_migration), 150);
  }
  return c;
}

ScaleCase scale_case(std::uint64_t seed, int packages, int releases, int incompatible) {
  Rng rng(seed);
  static const std::vector<std::string> pool{"1.0", "1.1", "1.2", "2.0", "2.1", "2.2", "3.0", "3.1"};
  auto name_of = [](int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "pkg%03d", i);
    return std::string(buf);
  };

  // Spread the release budget: every package gets one, the rest at random.
  std::vector<int> counts(static_cast<std::size_t>(packages), 1);
  for (int extra = releases - packages; extra > 0;) {
    auto& c = counts[static_cast<std::size_t>(uniform(rng, 0, packages - 1))];
    if (c < static_cast<int>(pool.size())) {
      ++c;
      --extra;
    }
  }

  std::vector<std::vector<std::string>> versions(static_cast<std::size_t>(packages));
  for (int i = 0; i < packages; ++i) {
    versions[static_cast<std::size_t>(i)].assign(pool.begin(), pool.begin() + counts[static_cast<std::size_t>(i)]);
  }

  std::set<std::pair<int, int>> gpl;
  while (static_cast<int>(gpl.size()) < incompatible) {
    const int p = uniform(rng, 1, packages - 1);
    const int k = counts[static_cast<std::size_t>(p)];
    gpl.emplace(p, chance(rng, 0.6) ? k - 1 : uniform(rng, 0, k - 1));
  }

  ScaleCase c;
  int clock = 0;
  for (int i = 0; i < packages; ++i) {
    const auto& vs = versions[static_cast<std::size_t>(i)];
    for (int j = 0; j < static_cast<int>(vs.size()); ++j) {
      std::vector<std::string> reqs;
      const int deps = i == 0 ? 8 : uniform(rng, 0, 3);
      for (int d = 0; d < deps; ++d) {
        const int lo = i + 1, hi = std::min(packages - 1, i + 25);
        if (lo > hi) break;
        const int t = i == 0 ? uniform(rng, 1, 12) : uniform(rng, lo, hi);
        const auto& tv = versions[static_cast<std::size_t>(t)];
        std::string spec;
        switch (uniform(rng, 0, 3)) {
          case 0: spec = ">=" + tv.front(); break;
          case 1: spec = "<=" + tv.back(); break;
          case 2: spec = "!=" + pick(rng, tv); break;
          default: break;
        }
        reqs.push_back(name_of(t) + spec);
      }
      const std::string lic = i == 0 ? "Apache-2.0" : gpl.count({i, j}) ? "GPL-3.0-only" : (chance(rng, 0.5) ? "MIT" : "BSD-3-Clause");
      char when[32];
      std::snprintf(when, sizeof when, "2021-%02d-%02dT%02d:%02d:00Z", 1 + clock / (28 * 24 * 60) % 12,
                    1 + clock / (24 * 60) % 28, clock / 60 % 24, clock % 60);
      ++clock;
      c.records.push_back(make_record(name_of(i), vs[static_cast<std::size_t>(j)], when, reqs, lic));
    }
  }
  c.root = {PackageName(name_of(0)), Version::parse(versions[0].back())};
  c.incompatible_versions = gpl.size();
  return c;
}

}  // namespace licremedy::testing
