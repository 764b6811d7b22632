#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "licremedy/index.hpp"
#include "licremedy/license_info.hpp"
#include "licremedy/model.hpp"

namespace licremedy {

struct UnresolvedRequirement {
  ReleaseId requirer;
  Requirement requirement;
  std::string reason;  // "conflict-ignored" or "unsatisfiable"

  bool operator==(const UnresolvedRequirement&) const = default;
};

inline constexpr std::string_view kConflictIgnored = "conflict-ignored";
inline constexpr std::string_view kUnsatisfiable = "unsatisfiable";

/// A rooted dependency graph resolved at one instant.
struct DependencyGraph {
  ReleaseId root;
  Timestamp resolved_at;
  /// Discovery order; the root comes first.
  std::vector<ReleaseId> nodes;
  /// Outgoing edges per node in requirement order. Every node has an entry.
  std::map<ReleaseId, std::vector<ReleaseId>> edges;
  std::map<ReleaseId, LicenseInfo> licenses;
  std::vector<UnresolvedRequirement> unresolved;

  bool contains(const ReleaseId& id) const { return edges.count(id) > 0; }
  /// The node carrying `name`, if any.
  std::optional<ReleaseId> find(const PackageName& name) const;
  LicenseInfo license_of(const ReleaseId& id) const;

  /// Appends a node with no edges; no-op when already present.
  void add_node(const ReleaseId& id, LicenseInfo license = {});
  void add_edge(const ReleaseId& from, const ReleaseId& to);

  bool operator==(const DependencyGraph&) const = default;
};

/// Environment used for a non-root release: same variables, no extras.
MarkerEnv transitive_env(const MarkerEnv& env);

/// Breadth-first, newest-satisfying-version, first-resolution-wins
/// resolution without backtracking. Only the root sees `env.extras`.
/// Throws UnknownRoot when the root release is not in the index.
DependencyGraph resolve(const PackageIndex& index, const ReleaseId& root, Timestamp t, const MarkerEnv& env = {});

struct GraphMetrics {
  int depth = 0;
  int in_degree = 0;
  int out_degree = 0;

  bool operator==(const GraphMetrics&) const = default;
};

/// Throws NodeNotInGraph.
GraphMetrics graph_metrics(const DependencyGraph& g, const ReleaseId& node);

/// Shortest-path depth of every node reachable from the root.
std::map<ReleaseId, int> node_depths(const DependencyGraph& g);

/// A shortest path root..node, preferring earlier edges. Empty when the node
/// is unreachable. Throws NodeNotInGraph.
std::vector<ReleaseId> path_from_root(const DependencyGraph& g, const ReleaseId& node);

std::string graph_to_json(const DependencyGraph& g, int indent = 2);
/// Throws SchemaViolation.
DependencyGraph graph_from_json(const std::string& text);

/// Parses "name==version".
ReleaseId parse_release_id(std::string_view text);

}  // namespace licremedy
