#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "licremedy/index.hpp"
#include "licremedy/license_info.hpp"

namespace licremedy {

/// Ordered by permissiveness; Unknown sits outside that order.
enum class LicenseCategory : std::uint8_t { kPermissive, kWeakCopyleft, kStrongCopyleft, kUnknown };
std::string_view to_string(LicenseCategory c);

enum class Compatibility : std::uint8_t { kCompatible, kIncompatible, kUnknown };
std::string_view to_string(Compatibility c);

/// The one-way incompatibility relation over a license set. A pair (A, B)
/// means derivative works of A-licensed software cannot be distributed
/// under B. The relation is not symmetric and never relates a license to
/// itself.
class CompatibilityMatrix {
 public:
  CompatibilityMatrix() = default;
  /// Throws SchemaViolation on unknown ids, self pairs, or licenses without
  /// a category.
  CompatibilityMatrix(std::set<SpdxId> licenses, std::map<SpdxId, LicenseCategory> categories,
                      std::set<std::pair<SpdxId, SpdxId>> incompatible, std::string version = {});

  static CompatibilityMatrix from_json(const std::string& text);
  static CompatibilityMatrix load(const std::filesystem::path& path);
  /// The curated 16-license matrix shipped with the library.
  static const CompatibilityMatrix& builtin();

  const std::set<SpdxId>& licenses() const { return licenses_; }
  bool contains(const SpdxId& id) const { return licenses_.count(id) > 0; }
  const std::set<std::pair<SpdxId, SpdxId>>& incompatible_pairs() const { return incompatible_; }
  /// Raw membership test on the pair set.
  bool incompatible(const SpdxId& dep, const SpdxId& root) const {
    return incompatible_.count({dep, root}) > 0;
  }
  std::optional<LicenseCategory> category(const SpdxId& id) const;
  const std::string& version() const { return version_; }

  /// Copy with extra pairs added (validated like the constructor).
  CompatibilityMatrix with_pairs(const std::set<std::pair<SpdxId, SpdxId>>& extra) const;

 private:
  std::set<SpdxId> licenses_;
  std::map<SpdxId, LicenseCategory> categories_;
  std::set<std::pair<SpdxId, SpdxId>> incompatible_;
  std::string version_;
};

/// Incompatible iff (dep, root) is in the matrix; Unknown if either side is
/// Unrecognizable. Throws OutOfMatrix when a known id is not in the matrix.
Compatibility is_incompatible(const LicenseInfo& dep, const LicenseInfo& root, const CompatibilityMatrix& m);

/// Non-throwing variant: out-of-matrix ids yield Unknown and set the flag.
Compatibility check_compatibility(const LicenseInfo& dep, const LicenseInfo& root, const CompatibilityMatrix& m,
                                  bool* out_of_matrix = nullptr) noexcept;

/// Throws OutOfMatrix for known ids missing from the matrix.
LicenseCategory categorize(const LicenseInfo& license, const CompatibilityMatrix& m);
/// Non-throwing variant: out-of-matrix ids are Unknown.
LicenseCategory category_or_unknown(const LicenseInfo& license, const CompatibilityMatrix& m) noexcept;

/// Licenses L with (L, L) in the relation. Empty for a valid matrix.
std::vector<SpdxId> lint_self_compatibility(const CompatibilityMatrix& m);
/// Pairs (A, B) where A is Permissive yet A is incompatible with B.
std::vector<std::pair<SpdxId, SpdxId>> lint_permissive_source(const CompatibilityMatrix& m);

// ---------------------------------------------------------------------------
// Normalization

struct KeywordRule {
  SpdxId id;
  std::vector<std::string> name_keywords;
  std::vector<std::string> version_keywords;
  std::vector<std::string> must_have;
  std::vector<std::string> must_not_have;

  /// Number of matched keywords when the rule fires on `text`, else nullopt.
  /// Matching is case-insensitive and on whole words.
  std::optional<int> score(std::string_view text) const;
};

/// Lowercases, splits letter/digit runs, turns "+" into "or later" and any
/// other punctuation into spaces. Keywords and fields are compared in this
/// form.
std::string normalize_license_text(std::string_view text);

struct NormalizationTables {
  std::map<std::string, SpdxId> classifier_to_spdx;
  std::map<std::string, SpdxId> field_to_spdx;
  std::vector<KeywordRule> keyword_rules;

  /// Built-in classifier table and keyword rules; field map left empty.
  static NormalizationTables builtin();
};

std::map<std::string, SpdxId> builtin_classifier_map();
std::vector<KeywordRule> builtin_keyword_rules();
std::vector<KeywordRule> keyword_rules_from_json(const std::string& text);
std::vector<KeywordRule> load_keyword_rules(const std::filesystem::path& path);

/// Maps each license field value that co-occurs with classifier-derived ids
/// to its most frequent id (ties toward the lexicographically smaller id).
std::map<std::string, SpdxId> build_field_mapping(std::span<const ReleaseRecord> records,
                                                  const std::map<std::string, SpdxId>& classifier_to_spdx);
std::map<std::string, SpdxId> build_field_mapping(const PackageIndex& index,
                                                  const std::map<std::string, SpdxId>& classifier_to_spdx);

/// External scanner for distribution files (a ScanCode-like tool).
class LicenseDetector {
 public:
  virtual ~LicenseDetector() = default;
  /// Scans an unpacked distribution tree. Throws on tool failure.
  virtual std::optional<SpdxId> detect(const std::filesystem::path& tree) = 0;
};

/// Runs `<command> <tree>` and reads an SPDX id from the first stdout line.
class SubprocessDetector : public LicenseDetector {
 public:
  explicit SubprocessDetector(std::string command) : command_(std::move(command)) {}
  std::optional<SpdxId> detect(const std::filesystem::path& tree) override;

 private:
  std::string command_;
};

struct DetectorHook {
  std::shared_ptr<LicenseDetector> detector;
  /// Where the unpacked files of a release live; nullopt when unavailable.
  std::function<std::optional<std::filesystem::path>(const ReleaseRecord&)> locate;
};

struct NormalizationResult {
  LicenseInfo license;
  LicenseSource step = LicenseSource::kFallback;
  std::vector<std::string> warnings;
};

/// Classifier tag, field map, keyword rules, detector, Unrecognizable; the
/// first hit wins.
NormalizationResult normalize_license(const ReleaseRecord& record, const NormalizationTables& tables,
                                      const DetectorHook* detector = nullptr);

/// Annotator for load_index: builds the field map over the loaded records
/// (on top of `tables`) and normalizes every record without an "spdx" preset.
LicenseAnnotator make_license_annotator(NormalizationTables tables, std::shared_ptr<DetectorHook> detector = {},
                                        std::function<void(const std::string&)> warn = {});

}  // namespace licremedy
