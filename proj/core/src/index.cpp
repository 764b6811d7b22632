#include "licremedy/index.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "licremedy/error.hpp"

namespace licremedy {

using nlohmann::json;

std::string_view to_string(LicenseSource source) {
  switch (source) {
    case LicenseSource::kNone: return "none";
    case LicenseSource::kPreset: return "preset";
    case LicenseSource::kClassifier: return "classifier";
    case LicenseSource::kFieldMap: return "field-map";
    case LicenseSource::kKeywords: return "keywords";
    case LicenseSource::kDetector: return "detector";
    case LicenseSource::kFallback: return "unrecognizable";
  }
  return "?";
}

std::vector<Requirement> merge_duplicate_requirements(std::vector<Requirement> reqs) {
  std::vector<Requirement> out;
  out.reserve(reqs.size());
  for (auto& req : reqs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Requirement& r) { return r.name == req.name; });
    if (it == out.end()) {
      out.push_back(std::move(req));
      continue;
    }
    it->specifiers.insert(it->specifiers.end(), req.specifiers.begin(), req.specifiers.end());
    it->extras.insert(req.extras.begin(), req.extras.end());
    if (it->marker != req.marker) {
      // An unconditional requirement absorbs conditional duplicates.
      if (!it->marker || !req.marker) {
        it->marker.reset();
      } else {
        it->marker = Marker::either(*it->marker, *req.marker);
      }
    }
  }
  return out;
}

ReleaseRecord record_from_json(const std::string& json_text, const std::function<void(const std::string&)>& warn) {
  json obj;
  try {
    obj = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaViolation(std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw SchemaViolation("record is not a JSON object");

  auto required_string = [&](const char* key) -> std::string {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) throw SchemaViolation(std::string("missing field '") + key + "'");
    if (!it->is_string()) throw SchemaViolation(std::string("field '") + key + "' is not a string");
    return it->get<std::string>();
  };
  auto optional_string = [&](const char* key) -> std::optional<std::string> {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw SchemaViolation(std::string("field '") + key + "' is not a string");
    return it->get<std::string>();
  };
  auto string_list = [&](const char* key) -> std::vector<std::string> {
    std::vector<std::string> out;
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return out;
    if (!it->is_array()) throw SchemaViolation(std::string("field '") + key + "' is not an array");
    for (const auto& item : *it) {
      if (!item.is_string()) throw SchemaViolation(std::string("field '") + key + "' has a non-string item");
      out.push_back(item.get<std::string>());
    }
    return out;
  };

  ReleaseRecord rec;
  try {
    rec.id.name = PackageName(required_string("name"));
    rec.id.version = Version::parse(required_string("version"));
    rec.upload_time = Timestamp::parse(required_string("upload_time"));
  } catch (const SchemaViolation&) {
    throw;
  } catch (const Error& e) {
    throw SchemaViolation(e.what());
  }

  std::vector<Requirement> reqs;
  for (const auto& line : string_list("requires_dist")) {
    try {
      reqs.push_back(Requirement::parse(line));
    } catch (const MalformedRequirement& e) {
      if (warn) warn(std::string("skipped requirement: ") + e.what());
    }
  }
  rec.requires_dist = merge_duplicate_requirements(std::move(reqs));
  rec.license_field = optional_string("license");
  rec.classifiers = string_list("classifiers");
  rec.preset_spdx = optional_string("spdx");
  return rec;
}

void apply_preset_licenses(std::span<ReleaseRecord> records) {
  for (auto& rec : records) {
    if (!rec.preset_spdx) continue;
    rec.license = LicenseInfo::from_string(*rec.preset_spdx);
    rec.license_source = LicenseSource::kPreset;
  }
}

// ---------------------------------------------------------------------------

PackageIndex::PackageIndex(std::vector<ReleaseRecord> records, std::vector<LoadDiagnostic>* dropped) {
  for (auto& rec : records) {
    packages_[rec.id.name].push_back(std::move(rec));
  }
  for (auto& [name, list] : packages_) {
    std::stable_sort(list.begin(), list.end(),
                     [](const ReleaseRecord& a, const ReleaseRecord& b) { return a.id.version < b.id.version; });
    auto last = std::unique(list.begin(), list.end(), [&](const ReleaseRecord& a, const ReleaseRecord& b) {
      if (a.id.version != b.id.version) return false;
      if (dropped) dropped->push_back({0, "duplicate release " + b.id.to_string() + " dropped"});
      return true;
    });
    list.erase(last, list.end());
    for (const auto& rec : list) {
      if (rec.license.is_known()) ++popularity_[rec.license.id()];
    }
  }
}

std::span<const ReleaseRecord> PackageIndex::releases(const PackageName& name) const {
  const auto it = packages_.find(name);
  if (it == packages_.end()) return {};
  return it->second;
}

std::vector<const ReleaseRecord*> PackageIndex::releases_at(const PackageName& name, Timestamp t) const {
  std::vector<const ReleaseRecord*> out;
  for (const auto& rec : releases(name)) {
    if (rec.upload_time <= t) out.push_back(&rec);
  }
  return out;
}

const ReleaseRecord* PackageIndex::find(const PackageName& name, const Version& version) const {
  const auto list = releases(name);
  const auto it = std::lower_bound(list.begin(), list.end(), version,
                                   [](const ReleaseRecord& r, const Version& v) { return r.id.version < v; });
  if (it == list.end() || it->id.version != version) return nullptr;
  return &*it;
}

std::size_t PackageIndex::release_count() const {
  std::size_t n = 0;
  for (const auto& [name, list] : packages_) n += list.size();
  return n;
}

std::size_t PackageIndex::popularity(const SpdxId& id) const {
  const auto it = popularity_.find(id);
  return it == popularity_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------

LoadResult load_index_from_string(const std::string& contents, const LoadOptions& options) {
  LoadResult result;
  std::vector<ReleaseRecord> records;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json(
          line, [&](const std::string& msg) { result.diagnostics.push_back({line_no, msg}); }));
    } catch (const SchemaViolation& e) {
      result.diagnostics.push_back({line_no, std::string("record skipped: ") + e.what()});
      ++result.skipped;
    }
  }

  apply_preset_licenses(records);
  if (options.annotate) options.annotate(records);

  result.index = PackageIndex(std::move(records), &result.diagnostics);
  result.index.set_snapshot_hash(sha256_hex(contents));
  return result;
}

LoadResult load_index(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open index file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoFailure("failed reading index file " + path.string());
  return load_index_from_string(buf.str(), options);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace licremedy
