#include "licremedy/registry.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#ifdef LICREMEDY_HAS_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include "licremedy/error.hpp"

namespace licremedy {

using nlohmann::json;

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) out.prefix = url.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string registry_json_to_record_json(const std::string& registry_body) {
  json doc;
  try {
    doc = json::parse(registry_body);
  } catch (const json::parse_error& e) {
    throw SchemaViolation(std::string("registry response is not JSON: ") + e.what());
  }
  const json& info = doc.value("info", json::object());
  json rec;
  rec["name"] = info.value("name", "");
  rec["version"] = info.value("version", "");
  rec["requires_dist"] = info.contains("requires_dist") && info["requires_dist"].is_array()
                             ? info["requires_dist"]
                             : json::array();
  rec["license"] = info.contains("license") && info["license"].is_string() ? info["license"] : json(nullptr);
  rec["classifiers"] =
      info.contains("classifiers") && info["classifiers"].is_array() ? info["classifiers"] : json::array();

  std::optional<Timestamp> earliest;
  for (const auto& file : doc.value("urls", json::array())) {
    std::string when;
    if (file.contains("upload_time_iso_8601") && file["upload_time_iso_8601"].is_string()) {
      when = file["upload_time_iso_8601"].get<std::string>();
    } else if (file.contains("upload_time") && file["upload_time"].is_string()) {
      when = file["upload_time"].get<std::string>();
    } else {
      continue;
    }
    const Timestamp t = Timestamp::parse(when);
    if (!earliest || t < *earliest) earliest = t;
  }
  if (earliest) rec["upload_time"] = earliest->to_iso();
  return rec.dump();
}

RegistryClient::RegistryClient(Options options) : options_(std::move(options)) {
  if (!options_.cache_dir.empty()) std::filesystem::create_directories(options_.cache_dir);
}

std::filesystem::path RegistryClient::cache_path(const PackageName& name, const std::string& version) const {
  return options_.cache_dir / (name.str() + "--" + version + ".json");
}

ReleaseRecord RegistryClient::fetch_release(const PackageName& name, const std::string& version) {
  std::string body;
  const bool cached = !options_.cache_dir.empty() && std::filesystem::exists(cache_path(name, version));
  if (cached) {
    body = read_file(cache_path(name, version));
  } else {
    body = download(name, version);
    if (!options_.cache_dir.empty()) {
      std::lock_guard lock(cache_mutex_);
      const auto final_path = cache_path(name, version);
      auto tmp = final_path;
      tmp += ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << body;
        if (!out) throw IoFailure("cannot write cache file " + tmp.string());
      }
      std::filesystem::rename(tmp, final_path);
    }
  }
  return record_from_json(registry_json_to_record_json(body));
}

std::string RegistryClient::download(const PackageName& name, const std::string& version) {
  const SplitUrl url = split_url(options_.base_url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(options_.request_timeout);
  client.set_read_timeout(options_.request_timeout);
  client.set_follow_location(true);
  const std::string path = url.prefix + "/pypi/" + name.str() + "/" + version + "/json";

  auto backoff = options_.initial_backoff;
  std::string last_error;
  bool rate_limited = false;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    ++network_calls_;
    auto res = client.Get(path);
    if (res) {
      if (res->status == 200) return res->body;
      if (res->status == 404) throw NotFound("registry has no release " + name.str() + "==" + version);
      rate_limited = res->status == 429;
      last_error = "HTTP " + std::to_string(res->status);
      if (!rate_limited && res->status < 500) {
        throw NetworkFailure("registry request " + path + " failed: " + last_error);
      }
    } else {
      rate_limited = false;
      last_error = httplib::to_string(res.error());
    }
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  if (rate_limited) {
    throw RateLimited("registry rate limit persisted after " + std::to_string(options_.max_attempts) +
                      " attempts for " + path);
  }
  throw NetworkFailure("registry request " + path + " failed after " + std::to_string(options_.max_attempts) +
                       " attempts: " + last_error);
}

}  // namespace licremedy
