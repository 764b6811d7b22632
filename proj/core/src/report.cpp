#include "licremedy/report.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace licremedy {

using nlohmann::json;

namespace {

std::string display(const ReleaseId& id) { return id.name.str() + " " + id.version.raw(); }

void footer(std::ostringstream& out, const ReportContext& ctx) {
  if (!ctx.warnings.empty()) {
    out << "\nWarnings:\n";
    for (const auto& w : ctx.warnings) out << "  - " << w << '\n';
  }
  out << "\nProvenance: index sha256 " << (ctx.index_sha256.empty() ? "n/a" : ctx.index_sha256) << ", matrix "
      << (ctx.matrix_version.empty() ? "n/a" : ctx.matrix_version) << '\n';
}

json provenance(const ReportContext& ctx) {
  return {{"index_sha256", ctx.index_sha256}, {"matrix_version", ctx.matrix_version}};
}

json action_json(const RemediationAction& a) {
  json j{{"kind", std::string(to_string(a.kind))}, {"package", a.package.str()}, {"text", a.to_string()}};
  if (a.kind == RemediationAction::Kind::kMigrate) j["target"] = a.target.str();
  if (a.version) j["version"] = a.version->raw();
  j["depth"] = a.depth ? json(*a.depth) : json(nullptr);
  return j;
}

}  // namespace

std::string render_report(const ReleaseId& release, const std::vector<SpdxId>& licenses,
                          const std::vector<RemediationPlan>& plans, ReportFormat format,
                          const ReportContext& context) {
  if (format == ReportFormat::kJson) {
    json doc;
    doc["release"] = {{"name", release.name.str()}, {"version", release.version.raw()}};
    doc["status"] = licenses.empty() && plans.empty() ? "no-remediation-found" : "remediations";
    doc["licenses"] = licenses;
    doc["plans"] = json::array();
    int rank = 0;
    for (const auto& plan : plans) {
      json actions = json::array();
      for (const auto& a : plan.actions) actions.push_back(action_json(a));
      json nodes = json::array();
      for (const auto& id : plan.resulting_graph.nodes) nodes.push_back(id.to_string());
      doc["plans"].push_back({{"rank", ++rank}, {"cost", plan.total_cost}, {"actions", actions},
                              {"resulting_nodes", nodes}});
    }
    doc["warnings"] = context.warnings;
    doc["provenance"] = provenance(context);
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "Possible Remediations for " << display(release) << ":\n";
  if (licenses.empty() && plans.empty()) {
    out << "No remediation found.\n";
    footer(out, context);
    return out.str();
  }
  int item = 0;
  if (!licenses.empty()) {
    RemediationAction change;
    change.kind = RemediationAction::Kind::kChangeLicense;
    change.licenses = licenses;
    out << ++item << ". " << change.to_string() << ";\n";
  }
  for (const auto& plan : plans) {
    ++item;
    if (plan.actions.size() == 1) {
      out << item << ". " << plan.actions.front().to_string() << ";\n";
      continue;
    }
    if (plan.actions.empty()) {
      out << item << ". Keep the current dependencies;\n";
      continue;
    }
    out << item << ". " << (item == 1 ? "Make" : "Or make") << " the following dependency changes:\n";
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
      out << "    " << static_cast<char>('a' + static_cast<int>(i % 26));
      if (i >= 26) out << i / 26;
      out << ") " << plan.actions[i].to_string() << (i + 1 == plan.actions.size() ? ".\n" : ";\n");
    }
  }
  footer(out, context);
  return out.str();
}

std::string render_not_needed(const ReleaseId& release, CompatibilityLabel label, ReportFormat format,
                              const ReportContext& context) {
  if (format == ReportFormat::kJson) {
    json doc;
    doc["release"] = {{"name", release.name.str()}, {"version", release.version.raw()}};
    doc["status"] = "not-needed";
    doc["label"] = std::string(to_string(label));
    doc["licenses"] = json::array();
    doc["plans"] = json::array();
    doc["warnings"] = context.warnings;
    doc["provenance"] = provenance(context);
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "No remediation needed for " << display(release) << " (" << to_string(label) << ").\n";
  footer(out, context);
  return out.str();
}

}  // namespace licremedy
