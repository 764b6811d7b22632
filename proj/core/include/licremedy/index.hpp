#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "licremedy/license_info.hpp"
#include "licremedy/model.hpp"

namespace licremedy {

/// Which normalization step produced a release's license.
enum class LicenseSource : std::uint8_t {
  kNone,        // not normalized yet
  kPreset,      // "spdx" field of a pre-normalized dump
  kClassifier,  // step 1
  kFieldMap,    // step 2
  kKeywords,    // step 3
  kDetector,    // step 4
  kFallback,    // step 5: Unrecognizable
};

std::string_view to_string(LicenseSource source);

struct ReleaseRecord {
  ReleaseId id;
  Timestamp upload_time;
  std::vector<Requirement> requires_dist;
  std::optional<std::string> license_field;
  std::vector<std::string> classifiers;
  /// Pre-normalized SPDX id carried by the dump, if any.
  std::optional<std::string> preset_spdx;

  LicenseInfo license;
  LicenseSource license_source = LicenseSource::kNone;
};

/// Builds a record from one dump/registry JSON object. Throws SchemaViolation
/// with a reason on missing or malformed required fields. Malformed
/// requirement lines are dropped and reported through `warn`.
ReleaseRecord record_from_json(const std::string& json_text,
                               const std::function<void(const std::string&)>& warn = {});

/// Merges requirements naming the same package: specifiers are conjoined and
/// differing markers are or-ed, keeping first-seen order.
std::vector<Requirement> merge_duplicate_requirements(std::vector<Requirement> reqs);

struct LoadDiagnostic {
  std::size_t line = 0;  // 1-based
  std::string message;
};

/// Immutable snapshot of the package universe.
class PackageIndex {
 public:
  PackageIndex() = default;
  /// Sorts releases per package and drops duplicate (name, version) pairs,
  /// keeping the first one. Popularity is computed from `record.license`.
  explicit PackageIndex(std::vector<ReleaseRecord> records, std::vector<LoadDiagnostic>* dropped = nullptr);

  /// Releases of `name`, ascending by version; empty span if unknown.
  std::span<const ReleaseRecord> releases(const PackageName& name) const;
  /// Releases uploaded at or before `t`, ascending by version.
  std::vector<const ReleaseRecord*> releases_at(const PackageName& name, Timestamp t) const;
  const ReleaseRecord* find(const PackageName& name, const Version& version) const;
  const ReleaseRecord* find(const ReleaseId& id) const { return find(id.name, id.version); }

  bool contains(const PackageName& name) const { return packages_.count(name) > 0; }
  std::size_t package_count() const { return packages_.size(); }
  std::size_t release_count() const;

  const std::map<PackageName, std::vector<ReleaseRecord>>& packages() const { return packages_; }
  /// Releases per normalized license id.
  const std::map<SpdxId, std::size_t>& license_popularity() const { return popularity_; }
  std::size_t popularity(const SpdxId& id) const;

  /// Hex SHA-256 of the loaded file, empty for in-memory indexes.
  const std::string& snapshot_hash() const { return snapshot_hash_; }
  void set_snapshot_hash(std::string hash) { snapshot_hash_ = std::move(hash); }

 private:
  std::map<PackageName, std::vector<ReleaseRecord>> packages_;
  std::map<SpdxId, std::size_t> popularity_;
  std::string snapshot_hash_;
};

/// Hook run over all parsed records before the index is frozen; the
/// licensing module supplies one that fills `ReleaseRecord::license`.
using LicenseAnnotator = std::function<void(std::span<ReleaseRecord>)>;

struct LoadOptions {
  LicenseAnnotator annotate;  // when empty only "spdx" presets are applied
};

struct LoadResult {
  PackageIndex index;
  std::vector<LoadDiagnostic> diagnostics;
  std::size_t skipped = 0;  // records rejected at line level
};

/// Reads a JSON-lines dump. Throws IoFailure when the file cannot be read;
/// per-line problems are collected as diagnostics.
LoadResult load_index(const std::filesystem::path& path, const LoadOptions& options = {});
/// Same as load_index but reads from an in-memory buffer.
LoadResult load_index_from_string(const std::string& contents, const LoadOptions& options = {});

/// Applies "spdx" presets; records without one are left untouched.
void apply_preset_licenses(std::span<ReleaseRecord> records);

std::string sha256_hex(std::string_view bytes);

}  // namespace licremedy
