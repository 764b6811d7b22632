#include "licremedy/detector.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace licremedy {

using nlohmann::json;

std::string_view to_string(CompatibilityLabel label) {
  switch (label) {
    case CompatibilityLabel::kCompatible: return "Compatible";
    case CompatibilityLabel::kIncompatible: return "Incompatible";
    case CompatibilityLabel::kUnknown: return "Unknown";
  }
  return "?";
}

namespace {

Detection detect_with(const DependencyGraph& g, const CompatibilityMatrix& m,
                      const std::function<LicenseInfo(const ReleaseId&)>& license_of) {
  Detection d;
  const LicenseInfo root_license = license_of(g.root);
  bool root_oom = false;
  check_compatibility(root_license, root_license, m, &root_oom);
  if (root_oom) d.out_of_matrix.push_back(g.root);

  const auto depths = node_depths(g);
  std::map<ReleaseId, int> in_degree;
  for (const auto& [from, out] : g.edges) {
    for (const auto& to : out) ++in_degree[to];
  }

  for (const auto& id : g.nodes) {
    if (id == g.root) continue;
    const LicenseInfo lic = license_of(id);
    if (!lic.is_known()) {
      d.unrecognizable.push_back(id);
      continue;
    }
    if (!m.contains(lic.id())) {
      d.out_of_matrix.push_back(id);
      continue;
    }
    if (!root_license.is_known() || root_oom) continue;
    if (!m.incompatible(lic.id(), root_license.id())) continue;
    IncompatibilityFinding f;
    f.dependency = id;
    f.dep_license = lic;
    const auto it = depths.find(id);
    f.depth = it == depths.end() ? -1 : it->second;
    f.in_degree = in_degree[id];
    f.out_degree = static_cast<int>(g.edges.at(id).size());
    f.witness_path = path_from_root(g, id);
    d.findings.push_back(std::move(f));
  }

  if (!root_license.is_known() || root_oom) {
    d.label = CompatibilityLabel::kUnknown;
  } else if (!d.findings.empty()) {
    d.label = CompatibilityLabel::kIncompatible;
  } else if (!d.unrecognizable.empty() ||
             std::any_of(d.out_of_matrix.begin(), d.out_of_matrix.end(),
                         [&](const ReleaseId& id) { return !(id == g.root); })) {
    d.label = CompatibilityLabel::kUnknown;
  } else {
    d.label = CompatibilityLabel::kCompatible;
  }
  return d;
}

}  // namespace

Detection detect(const DependencyGraph& g, const CompatibilityMatrix& m) {
  return detect_with(g, m, [&](const ReleaseId& id) { return g.license_of(id); });
}

Detection detect(const DependencyGraph& g, const PackageIndex& index, const CompatibilityMatrix& m) {
  return detect_with(g, m, [&](const ReleaseId& id) {
    const ReleaseRecord* rec = index.find(id);
    return rec ? rec->license : g.license_of(id);
  });
}

std::string detection_to_json(const DependencyGraph& g, const Detection& d, int indent) {
  json doc;
  doc["release"] = g.root.to_string();
  doc["license"] = g.license_of(g.root).to_string();
  doc["label"] = std::string(to_string(d.label));
  doc["findings"] = json::array();
  for (const auto& f : d.findings) {
    json path = json::array();
    for (const auto& id : f.witness_path) path.push_back(id.to_string());
    doc["findings"].push_back({{"dependency", f.dependency.to_string()},
                               {"license", f.dep_license.to_string()},
                               {"depth", f.depth},
                               {"in_degree", f.in_degree},
                               {"out_degree", f.out_degree},
                               {"path", path}});
  }
  doc["unrecognizable"] = json::array();
  for (const auto& id : d.unrecognizable) doc["unrecognizable"].push_back(id.to_string());
  doc["out_of_matrix"] = json::array();
  for (const auto& id : d.out_of_matrix) {
    doc["out_of_matrix"].push_back({{"release", id.to_string()}, {"license", g.license_of(id).to_string()}});
  }
  return doc.dump(indent);
}

namespace {

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                         std::size_t left_aligned = 1) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    std::string text;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) text += "  ";
      text += c < left_aligned ? pad(cells[c], width[c]) : lpad(cells[c], width[c]);
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out << text << '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& row : rows) line(row);
  return out.str();
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v);
  return buf;
}

double share(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

std::string detection_to_text(const DependencyGraph& g, const Detection& d) {
  std::ostringstream out;
  out << g.root.to_string() << " (" << g.license_of(g.root).to_string() << "): " << to_string(d.label) << '\n';
  if (!d.findings.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& f : d.findings) {
      rows.push_back({f.dependency.to_string(), f.dep_license.to_string(), std::to_string(f.depth),
                      std::to_string(f.in_degree), std::to_string(f.out_degree)});
    }
    out << '\n' << render_table({"Dependency", "License", "Depth", "In-degree", "Out-degree"}, rows, 2);
  }
  for (const auto& id : d.unrecognizable) {
    out << "warning: " << id.to_string() << " has an unrecognizable license\n";
  }
  for (const auto& id : d.out_of_matrix) {
    out << "warning: " << id.to_string() << " uses " << g.license_of(id).to_string()
        << ", which is not in the compatibility matrix\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------

std::vector<CdfRow> metric_cdf(const std::vector<IncompatibilityFinding>& findings, int max_threshold) {
  std::vector<CdfRow> rows;
  for (int k = 0; k <= max_threshold; ++k) {
    CdfRow row;
    row.threshold = k;
    std::size_t depth = 0, in = 0, out = 0;
    for (const auto& f : findings) {
      depth += f.depth <= k;
      in += f.in_degree <= k;
      out += f.out_degree <= k;
    }
    row.depth = share(depth, findings.size());
    row.in_degree = share(in, findings.size());
    row.out_degree = share(out, findings.size());
    rows.push_back(row);
  }
  return rows;
}

namespace {

bool upload_order(const ReleaseRecord* a, const ReleaseRecord* b) {
  if (a->upload_time != b->upload_time) return a->upload_time < b->upload_time;
  return a->id.version < b->id.version;
}

std::vector<const ReleaseRecord*> sample_releases(const PackageIndex& index, bool latest_per_year) {
  std::vector<const ReleaseRecord*> out;
  for (const auto& [name, list] : index.packages()) {
    if (!latest_per_year) {
      for (const auto& rec : list) out.push_back(&rec);
      continue;
    }
    std::map<int, const ReleaseRecord*> latest;
    for (const auto& rec : list) {
      auto& slot = latest[rec.upload_time.year()];
      if (!slot || upload_order(slot, &rec)) slot = &rec;
    }
    for (const auto& [year, rec] : latest) out.push_back(rec);
  }
  return out;
}

struct ReleaseOutcome {
  bool analyzed = false;
  CompatibilityLabel label = CompatibilityLabel::kCompatible;
  std::vector<IncompatibilityFinding> findings;
};

}  // namespace

StatsReport ecosystem_stats(const PackageIndex& index, const CompatibilityMatrix& m, const StatsOptions& options) {
  StatsReport report;
  const auto sample = sample_releases(index, options.latest_per_year);

  std::map<int, YearCategoryRow> years;
  for (const auto* rec : sample) {
    auto& row = years[rec->upload_time.year()];
    row.year = rec->upload_time.year();
    ++row.counts[static_cast<std::size_t>(category_or_unknown(rec->license, m))];
    ++row.total;
  }
  for (auto& [year, row] : years) report.years.push_back(row);

  for (const auto& [name, list] : index.packages()) {
    std::vector<const ReleaseRecord*> ordered;
    for (const auto& rec : list) ordered.push_back(&rec);
    std::sort(ordered.begin(), ordered.end(), upload_order);
    bool changed = false;
    for (std::size_t i = 1; i < ordered.size(); ++i) {
      const auto& before = ordered[i - 1]->license;
      const auto& after = ordered[i]->license;
      if (before == after) continue;
      changed = true;
      ++report.changes.events;
      const auto a = category_or_unknown(before, m);
      const auto b = category_or_unknown(after, m);
      if (a == LicenseCategory::kUnknown || b == LicenseCategory::kUnknown) {
        ++report.changes.involving_unknown;
      } else if (b < a) {
        ++report.changes.more_permissive;
      } else if (b > a) {
        ++report.changes.less_permissive;
      } else {
        ++report.changes.same_level;
      }
    }
    report.changes.packages_with_change += changed;
  }

  std::vector<ReleaseOutcome> outcomes(sample.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < sample.size(); i = next++) {
      const auto* rec = sample[i];
      const auto g = resolve(index, rec->id, rec->upload_time, options.env);
      if (g.nodes.size() < 2) continue;
      auto d = detect(g, m);
      outcomes[i].analyzed = true;
      outcomes[i].label = d.label;
      outcomes[i].findings = std::move(d.findings);
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, sample.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<IncompatibilityFinding> all;
  for (auto& o : outcomes) {
    if (!o.analyzed) continue;
    switch (o.label) {
      case CompatibilityLabel::kCompatible: ++report.labels.compatible; break;
      case CompatibilityLabel::kIncompatible: ++report.labels.incompatible; break;
      case CompatibilityLabel::kUnknown: ++report.labels.unknown; break;
    }
    std::move(o.findings.begin(), o.findings.end(), std::back_inserter(all));
  }
  report.findings = all.size();
  report.cdf = metric_cdf(all);
  return report;
}

std::string StatsReport::to_json(int indent) const {
  json doc;
  doc["years"] = json::array();
  for (const auto& row : years) {
    json counts;
    for (std::size_t c = 0; c < row.counts.size(); ++c) {
      counts[std::string(to_string(static_cast<LicenseCategory>(c)))] = row.counts[c];
    }
    doc["years"].push_back({{"year", row.year}, {"total", row.total}, {"counts", counts}});
  }
  doc["license_changes"] = {{"events", changes.events},
                            {"more_permissive", changes.more_permissive},
                            {"less_permissive", changes.less_permissive},
                            {"same_level", changes.same_level},
                            {"involving_unknown", changes.involving_unknown},
                            {"packages_with_change", changes.packages_with_change}};
  const auto total = labels.total();
  doc["labels"] = {{"Compatible", {{"count", labels.compatible}, {"percent", share(labels.compatible, total)}}},
                   {"Incompatible", {{"count", labels.incompatible}, {"percent", share(labels.incompatible, total)}}},
                   {"Unknown", {{"count", labels.unknown}, {"percent", share(labels.unknown, total)}}},
                   {"total", total}};
  doc["findings"] = findings;
  doc["cdf"] = json::array();
  for (const auto& row : cdf) {
    doc["cdf"].push_back({{"threshold", row.threshold},
                          {"depth", row.depth},
                          {"in_degree", row.in_degree},
                          {"out_degree", row.out_degree}});
  }
  return doc.dump(indent);
}

std::string StatsReport::to_text() const {
  std::ostringstream out;
  out << "License categories by year\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : years) {
    std::vector<std::string> cells{std::to_string(row.year)};
    for (auto n : row.counts) cells.push_back(percent(share(n, row.total)));
    cells.push_back(std::to_string(row.total));
    rows.push_back(std::move(cells));
  }
  out << render_table({"Year", "Permissive", "Weak Copyleft", "Strong Copyleft", "Unknown", "Releases"}, rows)
      << '\n';

  out << "Licensing changes\n";
  rows = {{"More permissive", std::to_string(changes.more_permissive)},
          {"Less permissive", std::to_string(changes.less_permissive)},
          {"Same level", std::to_string(changes.same_level)},
          {"Involving Unknown", std::to_string(changes.involving_unknown)},
          {"Total", std::to_string(changes.events)},
          {"Packages changed", std::to_string(changes.packages_with_change)}};
  out << render_table({"Direction", "Events"}, rows) << '\n';

  out << "Release labels\n";
  const auto total = labels.total();
  rows = {{"Compatible", std::to_string(labels.compatible), percent(share(labels.compatible, total))},
          {"Incompatible", std::to_string(labels.incompatible), percent(share(labels.incompatible, total))},
          {"Unknown", std::to_string(labels.unknown), percent(share(labels.unknown, total))},
          {"Total", std::to_string(total), percent(total ? 100.0 : 0.0)}};
  out << render_table({"Label", "Releases", "Share"}, rows) << '\n';

  out << "Cumulative distribution over " << findings << " incompatible dependencies\n";
  rows.clear();
  for (const auto& row : cdf) {
    rows.push_back({"<= " + std::to_string(row.threshold), percent(row.depth), percent(row.in_degree),
                    percent(row.out_degree)});
  }
  out << render_table({"Threshold", "Depth", "In-degree", "Out-degree"}, rows);
  return out.str();
}

}  // namespace licremedy
