#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "licremedy/licremedy.hpp"

using namespace licremedy;

namespace {

const PackageIndex& fixture_index() {
  static const PackageIndex index = [] {
    LoadOptions options;
    options.annotate = make_license_annotator(NormalizationTables::builtin());
    return load_index(std::string(LICREMEDY_TEST_DATA) + "/fiftyone-mini.jsonl", options).index;
  }();
  return index;
}

const ReleaseId kRoot{PackageName("fiftyone"), Version::parse("0.18.0")};

}  // namespace

static void BM_VersionParse(benchmark::State& state) {
  std::mt19937 rng(7);
  std::vector<std::string> texts;
  const char* suffixes[] = {"", "a1", "b2", "rc1", ".post1", ".dev3", "+local.7"};
  for (int i = 0; i < 256; ++i) {
    texts.push_back(std::to_string(rng() % 5) + "." + std::to_string(rng() % 30) + "." +
                    std::to_string(rng() % 10) + suffixes[rng() % 7]);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Version::parse(texts[i++ % texts.size()]));
  }
}
BENCHMARK(BM_VersionParse);

static void BM_VersionCompare(benchmark::State& state) {
  std::vector<Version> vs;
  for (int i = 0; i < 512; ++i) vs.push_back(Version::parse("1." + std::to_string(i % 37) + "." + std::to_string(i)));
  for (auto _ : state) {
    auto copy = vs;
    std::sort(copy.begin(), copy.end());
    benchmark::DoNotOptimize(copy.data());
  }
}
BENCHMARK(BM_VersionCompare);

static void BM_Resolve(benchmark::State& state) {
  const auto& index = fixture_index();
  const auto t = Timestamp::parse("2022-11-10T18:32:11Z");
  for (auto _ : state) {
    benchmark::DoNotOptimize(resolve(index, kRoot, t));
  }
}
BENCHMARK(BM_Resolve);

static void BM_FindOptimal(benchmark::State& state) {
  const auto& index = fixture_index();
  const auto& matrix = CompatibilityMatrix::builtin();
  const auto g = resolve(index, kRoot, Timestamp::parse("2022-11-10T18:32:11Z"));
  const auto problem = make_problem(index, kRoot, matrix, {});
  const auto baseline = baseline_assignment(problem, g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_optimal(problem, baseline));
  }
}
BENCHMARK(BM_FindOptimal);

static void BM_SolveTopFive(benchmark::State& state) {
  const auto& index = fixture_index();
  const auto& matrix = CompatibilityMatrix::builtin();
  const auto g = resolve(index, kRoot, Timestamp::parse("2022-11-10T18:32:11Z"));
  const auto problem = make_problem(index, kRoot, matrix, {{PackageName("ndjson"), PackageName("jsonlines")}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_top_n(problem, index, g, 5));
  }
}
BENCHMARK(BM_SolveTopFive);
BENCHMARK_MAIN();
