#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "licremedy/detector.hpp"
#include "licremedy/index.hpp"
#include "licremedy/licensing.hpp"
#include "licremedy/resolver.hpp"

namespace licremedy {

struct MigrationRule {
  PackageName source;
  PackageName target;

  auto operator<=>(const MigrationRule&) const = default;
};

/// Parses JSON lines of {"source": str, "target": str}. Throws
/// SchemaViolation on malformed lines or source == target.
std::vector<MigrationRule> migration_rules_from_jsonl(const std::string& text);
std::vector<MigrationRule> load_migration_rules(const std::filesystem::path& path);

struct CostModel {
  std::int64_t c_migration = 10;
  std::int64_t c_removal = 100;
};

/// Warnings for suspicious cost settings (negative values, removal cheaper
/// than migration).
std::vector<std::string> lint_cost_model(const CostModel& cost);

/// Version slot: oldest release is -k, latest -1, absent 0.
using Slot = int;

struct VarDomain {
  PackageName name;
  std::vector<Version> versions;  // ascending

  int k() const { return static_cast<int>(versions.size()); }
  /// Slot of `v`, or 0 when `v` is not a release of this package.
  Slot slot_of(const Version& v) const;
  /// Precondition: -k <= slot <= -1.
  const Version& version_at(Slot slot) const { return versions[static_cast<std::size_t>(slot + k())]; }
};

/// `var` takes one of `allowed` (sorted ascending).
struct Literal {
  std::size_t var = 0;
  std::vector<Slot> allowed;

  bool operator==(const Literal&) const = default;
};

enum class ClauseKind : std::uint8_t {
  kDependency,         // (p = v) implies some satisfying version of a requirement
  kRootFreedom,        // a direct dependency or migration target may take any value
  kLicenseExclusion,   // p != v for an incompatible (p, v)
  kRootPin,            // the root keeps its version
  kSolutionExclusion,  // drop at least one package changed by an earlier solution
};
std::string_view to_string(ClauseKind kind);

/// Disjunction of literals. An empty clause is unsatisfiable.
struct Clause {
  ClauseKind kind = ClauseKind::kDependency;
  std::vector<Literal> literals;

  bool operator==(const Clause&) const = default;
};

using Assignment = std::vector<Slot>;  // one slot per variable

struct SolverProblem {
  ReleaseId root;
  std::vector<VarDomain> vars;  // discovery order, root first
  std::map<PackageName, std::size_t> var_index;
  std::vector<Clause> clauses;
  CostModel cost;
  std::vector<MigrationRule> migrations;
  MarkerEnv env;

  std::optional<std::size_t> find(const PackageName& name) const;
  std::size_t root_var() const { return 0; }
};

struct VarsOptions {
  std::size_t max_packages = 2000;
  MarkerEnv env;
};

/// Packages reachable from the root's direct dependencies and from the
/// migration targets of those dependencies, through the requirements of any
/// of their versions. Throws UnknownRoot or UniverseTooLarge.
std::vector<VarDomain> build_vars(const PackageIndex& index, const ReleaseId& root,
                                  const std::vector<MigrationRule>& migrations, const VarsOptions& options = {});

std::vector<Clause> build_constraints(const PackageIndex& index, const ReleaseId& root,
                                      const std::vector<VarDomain>& vars, const CompatibilityMatrix& matrix,
                                      const std::vector<MigrationRule>& migrations, const MarkerEnv& env = {});

SolverProblem make_problem(const PackageIndex& index, const ReleaseId& root, const CompatibilityMatrix& matrix,
                           const std::vector<MigrationRule>& migrations, const CostModel& cost = {},
                           const VarsOptions& options = {});

bool satisfies(const Clause& clause, const Assignment& x);
/// Index of the first violated clause, if any.
std::optional<std::size_t> first_violation(const std::vector<Clause>& clauses, const Assignment& x);

/// Slots of the baseline graph's packages; 0 for packages not in it.
Assignment baseline_assignment(const SolverProblem& problem, const DependencyGraph& baseline);

struct MigrationPair {
  std::size_t source = 0;
  std::size_t target = 0;
};

/// Greedy pairing of removed sources with added targets: sources in name
/// order, each taking the first unpaired target (in name order) it has a
/// rule for.
std::vector<MigrationPair> pair_migrations(const SolverProblem& problem, const Assignment& baseline,
                                           const Assignment& x);

/// Total cost of moving from `baseline` to `x`.
std::int64_t objective(const SolverProblem& problem, const Assignment& baseline, const Assignment& x);

/// Variables whose slot differs from the baseline, by name.
std::vector<PackageName> changed_packages(const SolverProblem& problem, const Assignment& baseline,
                                          const Assignment& x);

/// Forbids every later solution from keeping all packages that `x` changed
/// to a present version.
Clause exclusion_clause(const SolverProblem& problem, const Assignment& baseline, const Assignment& x);

struct SolveOptions {
  std::chrono::milliseconds timeout{std::chrono::seconds(300)};  // per solve call
};

struct SolveStats {
  std::uint64_t nodes = 0;
  std::uint64_t leaves = 0;
};

/// Exact minimum of `objective` over the assignments satisfying
/// `problem.clauses` and `extra`. Equal-cost optima are ordered by sorted
/// changed names, then by the slot vector. nullopt when unsatisfiable.
/// Throws SolverTimeout.
std::optional<Assignment> find_optimal(const SolverProblem& problem, const Assignment& baseline,
                                       const std::vector<Clause>& extra = {}, const SolveOptions& options = {},
                                       SolveStats* stats = nullptr);

struct RemediationAction {
  enum class Kind : std::uint8_t { kChangeLicense, kMigrate, kRemove, kPin };

  Kind kind = Kind::kPin;
  std::vector<SpdxId> licenses;    // kChangeLicense
  PackageName package;             // migration source, removed or pinned package
  PackageName target;              // kMigrate
  std::optional<Version> version;  // kMigrate: target version; kPin: new version
  std::optional<int> depth;        // depth of `package` in the baseline graph

  std::string to_string() const;
  bool operator==(const RemediationAction&) const = default;
};

std::string_view to_string(RemediationAction::Kind kind);

struct RemediationPlan {
  std::vector<RemediationAction> actions;
  std::int64_t total_cost = 0;
  DependencyGraph resulting_graph;
  Assignment assignment;
};

/// Throws InconsistentSolution when `x` violates a clause of `problem`.
std::vector<RemediationAction> diff_to_actions(const SolverProblem& problem, const DependencyGraph& baseline,
                                               const Assignment& x);

/// Graph induced by an assignment: every present package, edges from the
/// requirements of the chosen versions. Packages nothing requires any more
/// are kept as unreachable nodes.
DependencyGraph graph_from_assignment(const SolverProblem& problem, const PackageIndex& index,
                                      const DependencyGraph& baseline, const Assignment& x);

/// Up to `n` plans in nondecreasing cost order. Throws NoSolution when there
/// is none, SolverTimeout when one iteration exceeds its budget.
std::vector<RemediationPlan> solve_top_n(const SolverProblem& problem, const PackageIndex& index,
                                         const DependencyGraph& baseline, int n, const SolveOptions& options = {});

/// Licenses the root could switch to so that no dependency is one-way
/// incompatible with it, most popular first, at most `m_limit`.
std::vector<SpdxId> compatible_licenses(const DependencyGraph& g, const CompatibilityMatrix& matrix,
                                        const std::map<SpdxId, std::size_t>& popularity, int m_limit,
                                        std::vector<std::string>* warnings = nullptr);

struct RemediationOptions {
  int n_plans = 5;
  int m_licenses = 3;
  CostModel cost;
  SolveOptions solve;
  std::size_t max_packages = 2000;
  MarkerEnv env;
};

struct RemediationOutcome {
  DependencyGraph baseline;
  Detection detection;
  bool needed = false;  // baseline labelled Incompatible
  std::vector<SpdxId> licenses;
  std::vector<RemediationPlan> plans;
  std::vector<std::string> warnings;
};

/// Resolve, detect, and when the release is Incompatible enumerate license
/// alternatives and dependency plans. A lack of plans is reported through
/// an empty `plans` list rather than NoSolution.
RemediationOutcome remediate(const PackageIndex& index, const ReleaseId& root, Timestamp t,
                             const CompatibilityMatrix& matrix, const std::vector<MigrationRule>& migrations,
                             const RemediationOptions& options = {});
/// Same, starting from an already resolved baseline graph.
RemediationOutcome remediate_graph(const PackageIndex& index, DependencyGraph baseline,
                                   const CompatibilityMatrix& matrix, const std::vector<MigrationRule>& migrations,
                                   const RemediationOptions& options = {});

}  // namespace licremedy
