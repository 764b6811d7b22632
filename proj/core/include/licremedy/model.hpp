#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "licremedy/version.hpp"

namespace licremedy {

/// Registry-normalized package name: lowercase, runs of `-`, `_` and `.`
/// collapsed to a single `-`.
class PackageName {
 public:
  PackageName() = default;
  /// Throws MalformedRequirement for empty input.
  explicit PackageName(std::string_view raw);

  static std::string normalize(std::string_view raw);

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  auto operator<=>(const PackageName&) const = default;

 private:
  std::string value_;
};

/// Milliseconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t millis = 0;

  /// Accepts ISO-8601 date-times such as "2022-11-10T08:15:00Z",
  /// "2022-11-10 08:15:00.123456", "2022-11-10T08:15:00+02:00" or a bare date.
  /// A missing offset means UTC. Throws MalformedTimestamp.
  static Timestamp parse(std::string_view iso);
  static Timestamp now();
  static constexpr Timestamp max() { return {INT64_MAX}; }

  /// "YYYY-MM-DDTHH:MM:SSZ", with ".mmm" added when the value has millis.
  std::string to_iso() const;
  int year() const;

  auto operator<=>(const Timestamp&) const = default;
};

enum class SpecOp : std::uint8_t {
  kEqual,         // ==
  kNotEqual,      // !=
  kLessEqual,     // <=
  kGreaterEqual,  // >=
  kLess,          // <
  kGreater,       // >
  kCompatible,    // ~=
  kArbitrary,     // ===
};

std::string_view to_string(SpecOp op);

/// One version clause such as `>=1.0` or `==2.*`.
class Specifier {
 public:
  static Specifier parse(std::string_view text);
  Specifier(SpecOp op, Version version);

  SpecOp op() const { return op_; }
  /// Version operand. For `===` this holds a best-effort parse and may be
  /// meaningless; the raw text is authoritative.
  const Version& version() const { return version_; }
  const std::string& version_text() const { return text_; }
  bool wildcard() const { return wildcard_; }

  /// True when this clause opts pre-releases in (it names one with any
  /// operator other than !=).
  bool names_prerelease() const;

  /// Clause satisfaction, without any pre-release filtering.
  bool contains(const Version& v) const;

  std::string to_string() const;
  bool operator==(const Specifier& other) const;

 private:
  Specifier() = default;
  bool prefix_match(const Version& v) const;

  SpecOp op_ = SpecOp::kEqual;
  Version version_;
  std::string text_;
  bool wildcard_ = false;
};

using SpecifierSet = std::vector<Specifier>;

/// Parses a comma-separated specifier list. Empty input gives an empty set.
SpecifierSet parse_specifiers(std::string_view text);
std::string to_string(const SpecifierSet& specs);

/// True iff `v` satisfies every clause. Pre-releases only match when
/// `allow_prerelease` is set or some clause names a pre-release.
bool constraint_matches(const Version& v, const SpecifierSet& specs, bool allow_prerelease = false);

/// Values the environment markers are evaluated against.
struct MarkerEnv {
  std::set<std::string> extras;  // normalized extra names
  std::map<std::string, std::string> vars{
      {"python_version", "3.10"},
      {"python_full_version", "3.10.0"},
      {"sys_platform", "linux"},
      {"os_name", "posix"},
      {"platform_system", "Linux"},
      {"platform_machine", "x86_64"},
      {"implementation_name", "cpython"},
      {"platform_python_implementation", "CPython"},
  };
};

/// A parsed PEP 508 environment marker.
class Marker {
 public:
  struct Node;

  static Marker parse(std::string_view text);

  bool evaluate(const MarkerEnv& env) const;
  /// True when the marker mentions the `extra` variable anywhere.
  bool references_extra() const;
  /// Extras compared with `extra == "..."` anywhere in the marker.
  std::set<std::string> referenced_extras() const;

  std::string to_string() const;
  bool operator==(const Marker& other) const;

  /// Logical or of two markers.
  static Marker either(const Marker& a, const Marker& b);

 private:
  std::shared_ptr<const Node> root_;
};

/// One `requires_dist` entry.
struct Requirement {
  PackageName name;
  std::set<std::string> extras;
  SpecifierSet specifiers;
  std::optional<Marker> marker;

  /// Throws MalformedRequirement.
  static Requirement parse(std::string_view raw);

  /// False when the marker rules this requirement out under `env`.
  bool active(const MarkerEnv& env) const { return !marker || marker->evaluate(env); }

  std::string to_string() const;
  bool operator==(const Requirement&) const = default;
};

inline Requirement parse_requirement(std::string_view raw) { return Requirement::parse(raw); }
inline Version parse_version(std::string_view raw) { return Version::parse(raw); }

struct ReleaseId {
  PackageName name;
  Version version;

  /// "name==version" using the version as spelled in the index.
  std::string to_string() const { return name.str() + "==" + version.raw(); }

  bool operator==(const ReleaseId&) const = default;
  auto operator<=>(const ReleaseId& o) const {
    if (auto c = name <=> o.name; c != 0) return c;
    return version <=> o.version;
  }
};

}  // namespace licremedy

template <>
struct std::hash<licremedy::PackageName> {
  std::size_t operator()(const licremedy::PackageName& n) const noexcept {
    return std::hash<std::string>{}(n.str());
  }
};
