#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace licremedy {

/// A PEP 440 version. Ordering and equality follow the normalized form, so
/// `1.0` and `1.0.0` compare equal while `raw()` keeps the spelling that was
/// parsed.
class Version {
 public:
  enum class PreTag : std::uint8_t { kAlpha, kBeta, kRc };

  struct PreRelease {
    PreTag tag;
    std::uint64_t number;
    bool operator==(const PreRelease&) const = default;
  };

  /// A local segment is either numeric or alphanumeric; numeric sorts higher.
  using LocalPart = std::variant<std::uint64_t, std::string>;

  /// Throws MalformedVersion when `raw` is not a PEP 440 version.
  static Version parse(std::string_view raw);
  static std::optional<Version> try_parse(std::string_view raw) noexcept;

  std::uint64_t epoch() const { return epoch_; }
  const std::vector<std::uint64_t>& release() const { return release_; }
  const std::optional<PreRelease>& pre() const { return pre_; }
  const std::optional<std::uint64_t>& post() const { return post_; }
  const std::optional<std::uint64_t>& dev() const { return dev_; }
  const std::vector<LocalPart>& local() const { return local_; }
  bool has_local() const { return !local_.empty(); }
  const std::string& raw() const { return raw_; }

  bool is_prerelease() const { return pre_.has_value() || dev_.has_value(); }
  bool is_postrelease() const { return post_.has_value(); }

  /// Same version with the local segment dropped.
  Version public_version() const;
  /// Epoch and release only.
  Version base_version() const;

  /// Canonical normalized spelling, e.g. "1!2.0rc1.post0.dev3+abc.5".
  std::string to_string() const;

  friend bool operator==(const Version& a, const Version& b) { return compare(a, b) == 0; }
  friend std::strong_ordering operator<=>(const Version& a, const Version& b) {
    return compare(a, b) <=> 0;
  }

 private:
  static int compare(const Version& a, const Version& b);

  std::uint64_t epoch_ = 0;
  std::vector<std::uint64_t> release_;
  std::optional<PreRelease> pre_;
  std::optional<std::uint64_t> post_;
  std::optional<std::uint64_t> dev_;
  std::vector<LocalPart> local_;
  std::string raw_;
};

}  // namespace licremedy
