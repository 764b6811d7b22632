#pragma once

#include <string>
#include <vector>

#include "licremedy/detector.hpp"
#include "licremedy/remediator.hpp"

namespace licremedy {

enum class ReportFormat : std::uint8_t { kText, kJson };

struct ReportContext {
  std::vector<std::string> warnings;
  std::string index_sha256;
  std::string matrix_version;
};

/// Remediation report. Text follows the layout
///
///   Possible Remediations for <package> <version>:
///   1. Change project license to A, B, or C;
///   2. Or make the following dependency changes:
///       a) Remove X;
///       b) Pin Y to 1.0.
///   3. Or make the following dependency changes:
///   ...
///
/// with single-action plans written inline ("3. Remove X;"), then warnings
/// and a provenance footer.
std::string render_report(const ReleaseId& release, const std::vector<SpdxId>& licenses,
                          const std::vector<RemediationPlan>& plans, ReportFormat format,
                          const ReportContext& context = {});

/// Report for a release whose label is not Incompatible.
std::string render_not_needed(const ReleaseId& release, CompatibilityLabel label, ReportFormat format,
                              const ReportContext& context = {});

}  // namespace licremedy
