#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace licremedy {

using SpdxId = std::string;

/// Canonical spelling of an SPDX id: deprecated "GPL-2.0" style ids become
/// "-only", a trailing "+" becomes "-or-later".
SpdxId canonical_spdx(std::string_view id);

/// Either a known SPDX identifier or Unrecognizable.
class LicenseInfo {
 public:
  LicenseInfo() = default;  // Unrecognizable

  static LicenseInfo known(SpdxId id) {
    LicenseInfo info;
    info.id_ = std::move(id);
    return info;
  }
  static LicenseInfo unrecognizable() { return {}; }

  bool is_known() const { return id_.has_value(); }
  /// Precondition: is_known().
  const SpdxId& id() const { return *id_; }

  /// SPDX id, or "Unrecognizable".
  std::string to_string() const { return id_ ? *id_ : std::string(kUnrecognizable); }
  /// Inverse of to_string().
  static LicenseInfo from_string(std::string_view text) {
    if (text.empty() || text == kUnrecognizable) return {};
    return known(canonical_spdx(text));
  }

  bool operator==(const LicenseInfo&) const = default;

  static constexpr std::string_view kUnrecognizable = "Unrecognizable";

 private:
  std::optional<SpdxId> id_;
};

}  // namespace licremedy
