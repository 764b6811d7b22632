#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <string>

#include "licremedy/index.hpp"

namespace licremedy {

/// Client for a PyPI-style JSON API (`GET /pypi/<name>/<version>/json`).
///
/// Responses are cached verbatim under `cache_dir` as
/// `<normalized-name>--<version>.json`; a cached release never touches the
/// network again, which keeps repeated runs offline-reproducible.
class RegistryClient {
 public:
  struct Options {
    std::string base_url = "https://pypi.org";
    std::filesystem::path cache_dir;
    int max_attempts = 5;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::seconds request_timeout{30};
  };

  explicit RegistryClient(Options options);

  /// Throws NotFound (404), RateLimited (429 after all retries),
  /// NetworkFailure (transport or 5xx after all retries) or SchemaViolation.
  ReleaseRecord fetch_release(const PackageName& name, const std::string& version);

  /// Number of HTTP requests issued so far.
  std::size_t network_calls() const { return network_calls_; }

  std::filesystem::path cache_path(const PackageName& name, const std::string& version) const;

 private:
  std::string download(const PackageName& name, const std::string& version);

  Options options_;
  std::size_t network_calls_ = 0;
  std::mutex cache_mutex_;
};

/// Converts a registry JSON document into a dump-format record object.
/// The upload time is the earliest file upload of the release.
std::string registry_json_to_record_json(const std::string& registry_body);

}  // namespace licremedy
