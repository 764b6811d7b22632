#include "licremedy/licensing.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "embedded_data.hpp"
#include "licremedy/error.hpp"

namespace licremedy {

using nlohmann::json;

std::string_view to_string(LicenseCategory c) {
  switch (c) {
    case LicenseCategory::kPermissive: return "Permissive";
    case LicenseCategory::kWeakCopyleft: return "WeakCopyleft";
    case LicenseCategory::kStrongCopyleft: return "StrongCopyleft";
    case LicenseCategory::kUnknown: return "Unknown";
  }
  return "?";
}

std::string_view to_string(Compatibility c) {
  switch (c) {
    case Compatibility::kCompatible: return "Compatible";
    case Compatibility::kIncompatible: return "Incompatible";
    case Compatibility::kUnknown: return "Unknown";
  }
  return "?";
}

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaViolation(std::string(what) + " is not valid JSON: " + e.what());
  }
}

constexpr std::array<std::string_view, 9> kGnuFamilies = {
    "GPL-1.0", "GPL-2.0", "GPL-3.0", "LGPL-2.0", "LGPL-2.1", "LGPL-3.0", "AGPL-1.0", "AGPL-3.0", "GFDL-1.3",
};

bool is_gnu_family(std::string_view id) {
  return std::find(kGnuFamilies.begin(), kGnuFamilies.end(), id) != kGnuFamilies.end();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

SpdxId canonical_spdx(std::string_view raw) {
  std::string id = trim(raw);
  if (!id.empty() && id.back() == '+') {
    std::string base = id.substr(0, id.size() - 1);
    if (is_gnu_family(base)) return base + "-or-later";
    return id;
  }
  if (is_gnu_family(id)) return id + "-only";
  return id;
}

// ---------------------------------------------------------------------------
// Matrix

CompatibilityMatrix::CompatibilityMatrix(std::set<SpdxId> licenses, std::map<SpdxId, LicenseCategory> categories,
                                         std::set<std::pair<SpdxId, SpdxId>> incompatible, std::string version)
    : licenses_(std::move(licenses)),
      categories_(std::move(categories)),
      incompatible_(std::move(incompatible)),
      version_(std::move(version)) {
  for (const auto& id : licenses_) {
    const auto it = categories_.find(id);
    if (it == categories_.end() || it->second == LicenseCategory::kUnknown) {
      throw SchemaViolation("matrix license " + id + " has no category");
    }
  }
  for (const auto& [id, cat] : categories_) {
    if (!licenses_.count(id)) throw SchemaViolation("matrix category for unlisted license " + id);
  }
  for (const auto& [a, b] : incompatible_) {
    if (!licenses_.count(a) || !licenses_.count(b)) {
      throw SchemaViolation("matrix pair (" + a + ", " + b + ") names an unlisted license");
    }
    if (a == b) throw SchemaViolation("matrix pair (" + a + ", " + a + ") relates a license to itself");
  }
}

CompatibilityMatrix CompatibilityMatrix::from_json(const std::string& text) {
  const json doc = parse_json(text, "matrix");
  if (!doc.is_object()) throw SchemaViolation("matrix is not a JSON object");
  try {
    std::set<SpdxId> licenses;
    for (const auto& id : doc.at("licenses")) licenses.insert(canonical_spdx(id.get<std::string>()));
    std::map<SpdxId, LicenseCategory> categories;
    for (const auto& [id, cat] : doc.at("categories").items()) {
      const auto name = cat.get<std::string>();
      LicenseCategory c;
      if (name == "permissive") {
        c = LicenseCategory::kPermissive;
      } else if (name == "weak") {
        c = LicenseCategory::kWeakCopyleft;
      } else if (name == "strong") {
        c = LicenseCategory::kStrongCopyleft;
      } else {
        throw SchemaViolation("unknown category '" + name + "' for " + id);
      }
      categories[canonical_spdx(id)] = c;
    }
    std::set<std::pair<SpdxId, SpdxId>> pairs;
    for (const auto& pair : doc.at("incompatible")) {
      if (!pair.is_array() || pair.size() != 2) throw SchemaViolation("matrix pair is not a two-element array");
      pairs.emplace(canonical_spdx(pair[0].get<std::string>()), canonical_spdx(pair[1].get<std::string>()));
    }
    std::string version = doc.contains("version") && doc["version"].is_string() ? doc["version"].get<std::string>()
                                                                                 : std::string();
    return CompatibilityMatrix(std::move(licenses), std::move(categories), std::move(pairs), std::move(version));
  } catch (const json::exception& e) {
    throw SchemaViolation(std::string("malformed matrix: ") + e.what());
  }
}

CompatibilityMatrix CompatibilityMatrix::load(const std::filesystem::path& path) {
  return from_json(read_text(path));
}

const CompatibilityMatrix& CompatibilityMatrix::builtin() {
  static const CompatibilityMatrix m = from_json(embedded::kMatrix16Json);
  return m;
}

std::optional<LicenseCategory> CompatibilityMatrix::category(const SpdxId& id) const {
  const auto it = categories_.find(id);
  if (it == categories_.end()) return std::nullopt;
  return it->second;
}

CompatibilityMatrix CompatibilityMatrix::with_pairs(const std::set<std::pair<SpdxId, SpdxId>>& extra) const {
  auto pairs = incompatible_;
  pairs.insert(extra.begin(), extra.end());
  return CompatibilityMatrix(licenses_, categories_, std::move(pairs), version_);
}

Compatibility is_incompatible(const LicenseInfo& dep, const LicenseInfo& root, const CompatibilityMatrix& m) {
  for (const auto* side : {&dep, &root}) {
    if (side->is_known() && !m.contains(side->id())) {
      throw OutOfMatrix("license " + side->id() + " is not in the compatibility matrix");
    }
  }
  if (!dep.is_known() || !root.is_known()) return Compatibility::kUnknown;
  return m.incompatible(dep.id(), root.id()) ? Compatibility::kIncompatible : Compatibility::kCompatible;
}

Compatibility check_compatibility(const LicenseInfo& dep, const LicenseInfo& root, const CompatibilityMatrix& m,
                                  bool* out_of_matrix) noexcept {
  const bool oom = (dep.is_known() && !m.contains(dep.id())) || (root.is_known() && !m.contains(root.id()));
  if (out_of_matrix) *out_of_matrix = oom;
  if (oom || !dep.is_known() || !root.is_known()) return Compatibility::kUnknown;
  return m.incompatible(dep.id(), root.id()) ? Compatibility::kIncompatible : Compatibility::kCompatible;
}

LicenseCategory categorize(const LicenseInfo& license, const CompatibilityMatrix& m) {
  if (!license.is_known()) return LicenseCategory::kUnknown;
  const auto c = m.category(license.id());
  if (!c) throw OutOfMatrix("license " + license.id() + " is not in the compatibility matrix");
  return *c;
}

LicenseCategory category_or_unknown(const LicenseInfo& license, const CompatibilityMatrix& m) noexcept {
  if (!license.is_known()) return LicenseCategory::kUnknown;
  return m.category(license.id()).value_or(LicenseCategory::kUnknown);
}

std::vector<SpdxId> lint_self_compatibility(const CompatibilityMatrix& m) {
  std::vector<SpdxId> out;
  for (const auto& id : m.licenses()) {
    if (m.incompatible(id, id)) out.push_back(id);
  }
  return out;
}

std::vector<std::pair<SpdxId, SpdxId>> lint_permissive_source(const CompatibilityMatrix& m) {
  std::vector<std::pair<SpdxId, SpdxId>> out;
  for (const auto& pair : m.incompatible_pairs()) {
    if (m.category(pair.first) == LicenseCategory::kPermissive) out.push_back(pair);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalization

std::string normalize_license_text(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 8);
  auto space = [&] {
    if (!out.empty() && out.back() != ' ') out.push_back(' ');
  };
  enum { kNone, kAlpha, kDigit } prev = kNone;
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalpha(c)) {
      if (prev == kDigit) space();
      out.push_back(static_cast<char>(std::tolower(c)));
      prev = kAlpha;
    } else if (std::isdigit(c)) {
      // "gplv3" reads as "gpl v 3".
      if (prev == kAlpha && out.size() >= 2 && out.back() == 'v' && std::isalpha(static_cast<unsigned char>(out[out.size() - 2]))) {
        out.insert(out.size() - 1, 1, ' ');
      }
      if (prev == kAlpha) space();
      out.push_back(static_cast<char>(c));
      prev = kDigit;
    } else {
      space();
      if (c == '+') out += "or later ";
      prev = kNone;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

namespace {

bool has_phrase(const std::string& padded_text, const std::string& keyword) {
  const std::string k = normalize_license_text(keyword);
  if (k.empty()) return false;
  return padded_text.find(" " + k + " ") != std::string::npos;
}

}  // namespace

std::optional<int> KeywordRule::score(std::string_view text) const {
  const std::string padded = " " + normalize_license_text(text) + " ";
  int hits = 0;
  bool name_hit = false;
  for (const auto& k : name_keywords) {
    if (has_phrase(padded, k)) {
      name_hit = true;
      ++hits;
    }
  }
  if (!name_hit) return std::nullopt;
  if (!version_keywords.empty()) {
    bool version_hit = false;
    for (const auto& k : version_keywords) {
      if (has_phrase(padded, k)) {
        version_hit = true;
        ++hits;
      }
    }
    if (!version_hit) return std::nullopt;
  }
  for (const auto& k : must_have) {
    if (!has_phrase(padded, k)) return std::nullopt;
    ++hits;
  }
  for (const auto& k : must_not_have) {
    if (has_phrase(padded, k)) return std::nullopt;
  }
  return hits;
}

std::vector<KeywordRule> keyword_rules_from_json(const std::string& text) {
  const json doc = parse_json(text, "keyword table");
  if (!doc.is_object()) throw SchemaViolation("keyword table is not a JSON object");
  std::vector<KeywordRule> rules;
  try {
    for (const auto& [id, body] : doc.items()) {
      if (!id.empty() && id.front() == '_') continue;
      KeywordRule rule;
      rule.id = canonical_spdx(id);
      auto list = [&](const char* key) {
        std::vector<std::string> out;
        if (body.contains(key)) {
          for (const auto& k : body.at(key)) out.push_back(k.get<std::string>());
        }
        return out;
      };
      rule.name_keywords = list("name_keywords");
      rule.version_keywords = list("version_keywords");
      rule.must_have = list("must_have");
      rule.must_not_have = list("must_not_have");
      if (rule.name_keywords.empty()) throw SchemaViolation("keyword rule " + id + " has no name keywords");
      rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw SchemaViolation(std::string("malformed keyword table: ") + e.what());
  }
  std::sort(rules.begin(), rules.end(), [](const KeywordRule& a, const KeywordRule& b) { return a.id < b.id; });
  return rules;
}

std::vector<KeywordRule> load_keyword_rules(const std::filesystem::path& path) {
  return keyword_rules_from_json(read_text(path));
}

std::vector<KeywordRule> builtin_keyword_rules() {
  static const std::vector<KeywordRule> rules = keyword_rules_from_json(embedded::kKeywordsJson);
  return rules;
}

std::map<std::string, SpdxId> builtin_classifier_map() {
  static const std::map<std::string, SpdxId> table = [] {
    std::map<std::string, SpdxId> out;
    const json doc = json::parse(embedded::kClassifiersJson);
    for (const auto& [k, v] : doc.items()) {
      if (!k.empty() && k.front() == '_') continue;
      out.emplace(k, v.get<std::string>());
    }
    return out;
  }();
  return table;
}

NormalizationTables NormalizationTables::builtin() {
  NormalizationTables t;
  t.classifier_to_spdx = builtin_classifier_map();
  t.keyword_rules = builtin_keyword_rules();
  return t;
}

namespace {

std::set<SpdxId> classifier_ids(const ReleaseRecord& rec, const std::map<std::string, SpdxId>& table) {
  std::set<SpdxId> ids;
  for (const auto& c : rec.classifiers) {
    const auto it = table.find(trim(c));
    if (it != table.end()) ids.insert(it->second);
  }
  return ids;
}

std::optional<std::string> field_key(const ReleaseRecord& rec) {
  if (!rec.license_field) return std::nullopt;
  std::string key = trim(*rec.license_field);
  if (key.empty()) return std::nullopt;
  return key;
}

}  // namespace

std::map<std::string, SpdxId> build_field_mapping(std::span<const ReleaseRecord> records,
                                                  const std::map<std::string, SpdxId>& classifier_to_spdx) {
  std::map<std::string, std::map<SpdxId, std::size_t>> counts;
  for (const auto& rec : records) {
    const auto key = field_key(rec);
    if (!key) continue;
    for (const auto& id : classifier_ids(rec, classifier_to_spdx)) ++counts[*key][id];
  }
  std::map<std::string, SpdxId> out;
  for (const auto& [field, per_id] : counts) {
    // std::map iterates ids in ascending order, so strict > keeps the smaller id on ties.
    const SpdxId* best = nullptr;
    std::size_t best_n = 0;
    for (const auto& [id, n] : per_id) {
      if (n > best_n) {
        best = &id;
        best_n = n;
      }
    }
    if (best) out.emplace(field, *best);
  }
  return out;
}

std::map<std::string, SpdxId> build_field_mapping(const PackageIndex& index,
                                                  const std::map<std::string, SpdxId>& classifier_to_spdx) {
  std::vector<ReleaseRecord> flat;
  for (const auto& [name, list] : index.packages()) flat.insert(flat.end(), list.begin(), list.end());
  return build_field_mapping(std::span<const ReleaseRecord>(flat), classifier_to_spdx);
}

std::optional<SpdxId> SubprocessDetector::detect(const std::filesystem::path& tree) {
  std::string quoted = "'";
  for (const char c : tree.string()) {
    if (c == '\'') {
      quoted += "'\\''";
    } else {
      quoted.push_back(c);
    }
  }
  quoted += "'";
  const std::string cmd = command_ + " " + quoted;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) throw IoFailure("cannot start detector: " + command_);
  std::string first_line;
  char buf[512];
  bool have_line = false;
  while (std::fgets(buf, sizeof buf, pipe)) {
    if (!have_line) {
      first_line += buf;
      if (!first_line.empty() && first_line.back() == '\n') have_line = true;
    }
  }
  const int status = ::pclose(pipe);
  if (status != 0) throw IoFailure("detector exited with status " + std::to_string(status) + ": " + command_);
  const std::string id = trim(first_line);
  if (id.empty() || id == LicenseInfo::kUnrecognizable) return std::nullopt;
  return canonical_spdx(id);
}

NormalizationResult normalize_license(const ReleaseRecord& record, const NormalizationTables& tables,
                                      const DetectorHook* detector) {
  NormalizationResult result;

  const auto from_classifiers = classifier_ids(record, tables.classifier_to_spdx);
  if (from_classifiers.size() == 1) {
    result.license = LicenseInfo::known(*from_classifiers.begin());
    result.step = LicenseSource::kClassifier;
    return result;
  }
  if (from_classifiers.size() > 1) {
    std::string ids;
    for (const auto& id : from_classifiers) ids += (ids.empty() ? "" : ", ") + id;
    result.warnings.push_back("multi-license: " + record.id.to_string() + " carries classifiers for " + ids);
    result.license = LicenseInfo::unrecognizable();
    result.step = LicenseSource::kClassifier;
    return result;
  }

  if (const auto key = field_key(record)) {
    if (const auto it = tables.field_to_spdx.find(*key); it != tables.field_to_spdx.end()) {
      result.license = LicenseInfo::known(it->second);
      result.step = LicenseSource::kFieldMap;
      return result;
    }
    const KeywordRule* best = nullptr;
    int best_score = 0;
    for (const auto& rule : tables.keyword_rules) {
      const auto s = rule.score(*key);
      if (s && (!best || *s > best_score || (*s == best_score && rule.id < best->id))) {
        best = &rule;
        best_score = *s;
      }
    }
    if (best) {
      result.license = LicenseInfo::known(best->id);
      result.step = LicenseSource::kKeywords;
      return result;
    }
  }

  if (detector && detector->detector) {
    std::optional<std::filesystem::path> tree;
    if (detector->locate) tree = detector->locate(record);
    if (tree) {
      try {
        if (auto id = detector->detector->detect(*tree)) {
          result.license = LicenseInfo::known(std::move(*id));
          result.step = LicenseSource::kDetector;
          return result;
        }
      } catch (const std::exception& e) {
        result.warnings.push_back("detector failed for " + record.id.to_string() + ": " + e.what());
      }
    }
  }

  result.license = LicenseInfo::unrecognizable();
  result.step = LicenseSource::kFallback;
  return result;
}

LicenseAnnotator make_license_annotator(NormalizationTables tables, std::shared_ptr<DetectorHook> detector,
                                        std::function<void(const std::string&)> warn) {
  return [tables = std::move(tables), detector = std::move(detector),
          warn = std::move(warn)](std::span<ReleaseRecord> records) {
    NormalizationTables effective = tables;
    auto mapped = build_field_mapping(std::span<const ReleaseRecord>(records.data(), records.size()),
                                      effective.classifier_to_spdx);
    for (const auto& [field, id] : tables.field_to_spdx) mapped[field] = id;
    effective.field_to_spdx = std::move(mapped);
    for (auto& rec : records) {
      if (rec.preset_spdx) continue;
      auto result = normalize_license(rec, effective, detector.get());
      rec.license = std::move(result.license);
      rec.license_source = result.step;
      if (warn) {
        for (const auto& w : result.warnings) warn(w);
      }
    }
  };
}

}  // namespace licremedy
