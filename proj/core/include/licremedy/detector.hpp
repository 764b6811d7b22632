#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "licremedy/licensing.hpp"
#include "licremedy/resolver.hpp"

namespace licremedy {

enum class CompatibilityLabel : std::uint8_t { kCompatible, kIncompatible, kUnknown };
std::string_view to_string(CompatibilityLabel label);

struct IncompatibilityFinding {
  ReleaseId dependency;
  LicenseInfo dep_license;
  int depth = 0;
  int in_degree = 0;
  int out_degree = 0;
  /// Root first, dependency last; size is depth + 1.
  std::vector<ReleaseId> witness_path;

  bool operator==(const IncompatibilityFinding&) const = default;
};

struct Detection {
  CompatibilityLabel label = CompatibilityLabel::kCompatible;
  std::vector<IncompatibilityFinding> findings;
  /// Non-root nodes whose license is Unrecognizable.
  std::vector<ReleaseId> unrecognizable;
  /// Nodes (root included) whose known license is missing from the matrix.
  std::vector<ReleaseId> out_of_matrix;
};

/// Labels a graph using the licenses it carries.
Detection detect(const DependencyGraph& g, const CompatibilityMatrix& m);
/// Same, but takes node licenses from the index (nodes missing from the
/// index keep the license stored in the graph).
Detection detect(const DependencyGraph& g, const PackageIndex& index, const CompatibilityMatrix& m);

std::string detection_to_json(const DependencyGraph& g, const Detection& d, int indent = 2);
std::string detection_to_text(const DependencyGraph& g, const Detection& d);

// ---------------------------------------------------------------------------
// Ecosystem statistics

struct StatsOptions {
  /// Keep only the latest upload of each package in each calendar year.
  bool latest_per_year = true;
  unsigned threads = 0;  // 0 = hardware concurrency
  MarkerEnv env;
};

struct YearCategoryRow {
  int year = 0;
  std::array<std::size_t, 4> counts{};  // indexed by LicenseCategory
  std::size_t total = 0;
};

struct LicenseChangeStats {
  std::size_t events = 0;
  std::size_t more_permissive = 0;
  std::size_t less_permissive = 0;
  std::size_t same_level = 0;
  /// Changes where either side falls in the Unknown category.
  std::size_t involving_unknown = 0;
  std::size_t packages_with_change = 0;
};

struct LabelStats {
  std::size_t compatible = 0;
  std::size_t incompatible = 0;
  std::size_t unknown = 0;
  std::size_t total() const { return compatible + incompatible + unknown; }
};

struct CdfRow {
  int threshold = 0;
  /// Percentage of findings whose metric is <= threshold.
  double depth = 0;
  double in_degree = 0;
  double out_degree = 0;
};

struct StatsReport {
  std::vector<YearCategoryRow> years;
  LicenseChangeStats changes;
  LabelStats labels;
  std::size_t findings = 0;
  std::vector<CdfRow> cdf;  // thresholds 0..5

  std::string to_json(int indent = 2) const;
  std::string to_text() const;
};

/// Category shares per year, licensing changes, release labels (each sampled
/// release resolved at its own upload time, counting only releases with at
/// least one dependency) and metric CDFs over all findings.
StatsReport ecosystem_stats(const PackageIndex& index, const CompatibilityMatrix& m, const StatsOptions& options = {});

/// Finding-level CDF for thresholds 0..max_threshold.
std::vector<CdfRow> metric_cdf(const std::vector<IncompatibilityFinding>& findings, int max_threshold = 5);

}  // namespace licremedy
