#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "licremedy/licremedy.hpp"

namespace licremedy::testing {

std::filesystem::path data_path(const std::string& name);
std::filesystem::path golden_path(const std::string& name);
std::string read_file(const std::filesystem::path& path);

/// Record with a preset license ("" means Unrecognizable).
ReleaseRecord make_record(const std::string& name, const std::string& version, const std::string& upload,
                          const std::vector<std::string>& requires_dist, const std::string& spdx);

PackageIndex index_of(std::vector<ReleaseRecord> records);
std::vector<ReleaseRecord> records_of(const PackageIndex& index);

/// fiftyone-mini loaded through the default normalization pipeline.
const PackageIndex& fiftyone_index();
ReleaseId fiftyone_root();
Timestamp fiftyone_time();
std::vector<MigrationRule> fiftyone_migrations();

using Rng = std::mt19937_64;

/// Random PEP 440 string covering epochs, pre/post/dev and local segments.
std::string random_version_string(Rng& rng);

struct ResolverCase {
  std::vector<ReleaseRecord> records;
  ReleaseId root;
  Timestamp at;
  MarkerEnv env;
};

/// Up to `max_packages` packages with up to `max_versions` releases each,
/// random constraints, markers and upload times.
ResolverCase random_resolver_case(Rng& rng, int max_packages = 10, int max_versions = 5);

struct SolverCase {
  std::vector<ReleaseRecord> records;
  ReleaseId root;
  CompatibilityMatrix matrix;
  std::vector<MigrationRule> migrations;
  CostModel cost;
};

/// Up to `max_packages` packages (root included) with up to `max_versions`
/// releases, random licenses, a random incompatibility relation and random
/// migration rules.
SolverCase random_solver_case(Rng& rng, int max_packages = 6, int max_versions = 4);

struct ScaleCase {
  std::vector<ReleaseRecord> records;
  ReleaseId root;
  std::size_t incompatible_versions = 0;
};

/// Layered synthetic ecosystem: `packages` packages, `releases` releases in
/// total, `incompatible` GPL-3.0-only releases below an Apache-2.0 root.
ScaleCase scale_case(std::uint64_t seed, int packages = 500, int releases = 2000, int incompatible = 20);

/// Random matrix over the given licenses with each ordered pair related
/// with probability `density`.
CompatibilityMatrix random_matrix(Rng& rng, const std::vector<SpdxId>& licenses, double density);

}  // namespace licremedy::testing
