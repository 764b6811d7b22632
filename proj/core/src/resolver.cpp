#include "licremedy/resolver.hpp"

#include <algorithm>
#include <deque>

#include <nlohmann/json.hpp>

#include "licremedy/error.hpp"

namespace licremedy {

using nlohmann::json;

std::optional<ReleaseId> DependencyGraph::find(const PackageName& name) const {
  for (const auto& id : nodes) {
    if (id.name == name) return id;
  }
  return std::nullopt;
}

LicenseInfo DependencyGraph::license_of(const ReleaseId& id) const {
  const auto it = licenses.find(id);
  return it == licenses.end() ? LicenseInfo::unrecognizable() : it->second;
}

void DependencyGraph::add_node(const ReleaseId& id, LicenseInfo license) {
  if (edges.count(id)) return;
  nodes.push_back(id);
  edges[id];
  licenses[id] = std::move(license);
}

void DependencyGraph::add_edge(const ReleaseId& from, const ReleaseId& to) {
  auto& out = edges.at(from);
  if (std::find(out.begin(), out.end(), to) == out.end()) out.push_back(to);
}

MarkerEnv transitive_env(const MarkerEnv& env) {
  MarkerEnv out = env;
  out.extras.clear();
  return out;
}

DependencyGraph resolve(const PackageIndex& index, const ReleaseId& root, Timestamp t, const MarkerEnv& env) {
  const ReleaseRecord* root_rec = index.find(root);
  if (!root_rec) throw UnknownRoot("release " + root.to_string() + " is not in the index");

  DependencyGraph g;
  g.root = root_rec->id;
  g.resolved_at = t;
  g.add_node(root_rec->id, root_rec->license);

  const MarkerEnv deps_env = transitive_env(env);
  std::map<PackageName, ReleaseId> resolved{{root_rec->id.name, root_rec->id}};
  std::deque<const ReleaseRecord*> queue{root_rec};

  while (!queue.empty()) {
    const ReleaseRecord* cur = queue.front();
    queue.pop_front();
    const MarkerEnv& active_env = cur == root_rec ? env : deps_env;
    for (const auto& req : cur->requires_dist) {
      if (!req.active(active_env)) continue;
      if (req.name == cur->id.name) continue;

      if (const auto it = resolved.find(req.name); it != resolved.end()) {
        if (!constraint_matches(it->second.version, req.specifiers, true)) {
          g.unresolved.push_back({cur->id, req, std::string(kConflictIgnored)});
        }
        g.add_edge(cur->id, it->second);
        continue;
      }

      const ReleaseRecord* pick = nullptr;
      for (const auto* rec : index.releases_at(req.name, t)) {
        if (constraint_matches(rec->id.version, req.specifiers)) pick = rec;  // ascending, so the last is highest
      }
      if (!pick) {
        g.unresolved.push_back({cur->id, req, std::string(kUnsatisfiable)});
        continue;
      }
      resolved.emplace(req.name, pick->id);
      g.add_node(pick->id, pick->license);
      g.add_edge(cur->id, pick->id);
      queue.push_back(pick);
    }
  }
  return g;
}

std::map<ReleaseId, int> node_depths(const DependencyGraph& g) {
  std::map<ReleaseId, int> depth;
  if (!g.contains(g.root)) return depth;
  depth[g.root] = 0;
  std::deque<ReleaseId> queue{g.root};
  while (!queue.empty()) {
    const ReleaseId cur = queue.front();
    queue.pop_front();
    for (const auto& next : g.edges.at(cur)) {
      if (depth.emplace(next, depth[cur] + 1).second) queue.push_back(next);
    }
  }
  return depth;
}

GraphMetrics graph_metrics(const DependencyGraph& g, const ReleaseId& node) {
  if (!g.contains(node)) throw NodeNotInGraph(node.to_string() + " is not in the graph");
  GraphMetrics m;
  const auto depths = node_depths(g);
  const auto it = depths.find(node);
  m.depth = it == depths.end() ? -1 : it->second;
  m.out_degree = static_cast<int>(g.edges.at(node).size());
  for (const auto& [from, out] : g.edges) {
    if (std::find(out.begin(), out.end(), node) != out.end()) ++m.in_degree;
  }
  return m;
}

std::vector<ReleaseId> path_from_root(const DependencyGraph& g, const ReleaseId& node) {
  if (!g.contains(node)) throw NodeNotInGraph(node.to_string() + " is not in the graph");
  std::map<ReleaseId, ReleaseId> parent;
  std::deque<ReleaseId> queue{g.root};
  parent.emplace(g.root, g.root);
  while (!queue.empty() && !parent.count(node)) {
    const ReleaseId cur = queue.front();
    queue.pop_front();
    for (const auto& next : g.edges.at(cur)) {
      if (parent.emplace(next, cur).second) queue.push_back(next);
    }
  }
  if (!parent.count(node)) return {};
  std::vector<ReleaseId> path{node};
  while (!(path.back() == g.root)) path.push_back(parent.at(path.back()));
  std::reverse(path.begin(), path.end());
  return path;
}

ReleaseId parse_release_id(std::string_view text) {
  const auto sep = text.find("==");
  if (sep == std::string_view::npos) throw SchemaViolation("expected name==version, got '" + std::string(text) + "'");
  try {
    return {PackageName(text.substr(0, sep)), Version::parse(text.substr(sep + 2))};
  } catch (const Error& e) {
    throw SchemaViolation(e.what());
  }
}

std::string graph_to_json(const DependencyGraph& g, int indent) {
  json doc;
  doc["root"] = g.root.to_string();
  doc["resolved_at"] = g.resolved_at.to_iso();
  doc["nodes"] = json::array();
  for (const auto& id : g.nodes) {
    doc["nodes"].push_back({{"name", id.name.str()}, {"version", id.version.raw()},
                            {"license", g.license_of(id).to_string()}});
  }
  doc["edges"] = json::array();
  for (const auto& from : g.nodes) {
    for (const auto& to : g.edges.at(from)) doc["edges"].push_back({from.to_string(), to.to_string()});
  }
  doc["unresolved"] = json::array();
  for (const auto& u : g.unresolved) {
    doc["unresolved"].push_back(
        {{"requirer", u.requirer.to_string()}, {"requirement", u.requirement.to_string()}, {"reason", u.reason}});
  }
  return doc.dump(indent);
}

DependencyGraph graph_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaViolation(std::string("graph is not valid JSON: ") + e.what());
  }
  DependencyGraph g;
  try {
    g.root = parse_release_id(doc.at("root").get<std::string>());
    g.resolved_at = Timestamp::parse(doc.at("resolved_at").get<std::string>());
    for (const auto& n : doc.at("nodes")) {
      ReleaseId id{PackageName(n.at("name").get<std::string>()), Version::parse(n.at("version").get<std::string>())};
      g.add_node(id, LicenseInfo::from_string(n.value("license", std::string())));
    }
    for (const auto& e : doc.at("edges")) {
      const auto from = parse_release_id(e.at(0).get<std::string>());
      const auto to = parse_release_id(e.at(1).get<std::string>());
      if (!g.contains(from) || !g.contains(to)) throw SchemaViolation("edge endpoint is not a node");
      g.add_edge(from, to);
    }
    for (const auto& u : doc.value("unresolved", json::array())) {
      g.unresolved.push_back({parse_release_id(u.at("requirer").get<std::string>()),
                              Requirement::parse(u.at("requirement").get<std::string>()),
                              u.at("reason").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw SchemaViolation(std::string("malformed graph: ") + e.what());
  } catch (const SchemaViolation&) {
    throw;
  } catch (const Error& e) {
    throw SchemaViolation(std::string("malformed graph: ") + e.what());
  }
  if (!g.contains(g.root)) throw SchemaViolation("graph root is not a node");
  return g;
}

}  // namespace licremedy
