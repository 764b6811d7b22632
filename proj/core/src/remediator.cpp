#include "licremedy/remediator.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "licremedy/error.hpp"

namespace licremedy {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Inputs

std::vector<MigrationRule> migration_rules_from_jsonl(const std::string& text) {
  std::vector<MigrationRule> rules;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "migration rule line " + std::to_string(line_no);
    try {
      const json obj = json::parse(line);
      MigrationRule rule{PackageName(obj.at("source").get<std::string>()),
                         PackageName(obj.at("target").get<std::string>())};
      if (rule.source == rule.target) throw SchemaViolation(where + ": source equals target");
      rules.push_back(std::move(rule));
    } catch (const json::exception& e) {
      throw SchemaViolation(where + ": " + e.what());
    } catch (const MalformedRequirement& e) {
      throw SchemaViolation(where + ": " + e.what());
    }
  }
  std::sort(rules.begin(), rules.end());
  rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
  return rules;
}

std::vector<MigrationRule> load_migration_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open migration rules " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return migration_rules_from_jsonl(buf.str());
}

std::vector<std::string> lint_cost_model(const CostModel& cost) {
  std::vector<std::string> out;
  if (cost.c_migration < 0) out.push_back("c_migration is negative");
  if (cost.c_removal < 0) out.push_back("c_removal is negative");
  if (cost.c_removal < cost.c_migration) out.push_back("c_removal is smaller than c_migration");
  return out;
}

Slot VarDomain::slot_of(const Version& v) const {
  const auto it = std::lower_bound(versions.begin(), versions.end(), v);
  if (it == versions.end() || *it != v) return 0;
  return static_cast<Slot>(it - versions.begin()) - k();
}

std::string_view to_string(ClauseKind kind) {
  switch (kind) {
    case ClauseKind::kDependency: return "dependency";
    case ClauseKind::kRootFreedom: return "root-freedom";
    case ClauseKind::kLicenseExclusion: return "license-exclusion";
    case ClauseKind::kRootPin: return "root-pin";
    case ClauseKind::kSolutionExclusion: return "solution-exclusion";
  }
  return "?";
}

std::optional<std::size_t> SolverProblem::find(const PackageName& name) const {
  const auto it = var_index.find(name);
  if (it == var_index.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Encoding

namespace {

std::vector<PackageName> direct_dependencies(const ReleaseRecord& root, const MarkerEnv& env) {
  std::vector<PackageName> out;
  for (const auto& req : root.requires_dist) {
    if (!req.active(env) || req.name == root.id.name) continue;
    if (std::find(out.begin(), out.end(), req.name) == out.end()) out.push_back(req.name);
  }
  return out;
}

std::vector<Slot> all_slots(const VarDomain& d) {
  std::vector<Slot> out;
  for (Slot s = -d.k(); s <= 0; ++s) out.push_back(s);
  return out;
}

std::vector<Slot> all_slots_except(const VarDomain& d, Slot skip) {
  std::vector<Slot> out;
  for (Slot s = -d.k(); s <= 0; ++s) {
    if (s != skip) out.push_back(s);
  }
  return out;
}

/// Direct dependencies plus migration targets of direct dependencies, in
/// that order, restricted to packages the index knows.
std::vector<PackageName> root_seeds(const PackageIndex& index, const ReleaseRecord& root,
                                    const std::vector<MigrationRule>& migrations, const MarkerEnv& env) {
  std::vector<PackageName> seeds;
  const auto direct = direct_dependencies(root, env);
  for (const auto& name : direct) {
    if (index.contains(name)) seeds.push_back(name);
  }
  for (const auto& rule : migrations) {
    if (std::find(direct.begin(), direct.end(), rule.source) == direct.end()) continue;
    if (!index.contains(rule.target) || rule.target == root.id.name) continue;
    if (std::find(seeds.begin(), seeds.end(), rule.target) == seeds.end()) seeds.push_back(rule.target);
  }
  return seeds;
}

}  // namespace

std::vector<VarDomain> build_vars(const PackageIndex& index, const ReleaseId& root,
                                  const std::vector<MigrationRule>& migrations, const VarsOptions& options) {
  const ReleaseRecord* root_rec = index.find(root);
  if (!root_rec) throw UnknownRoot("release " + root.to_string() + " is not in the index");

  std::vector<PackageName> order{root.name};
  std::set<PackageName> seen{root.name};
  auto add = [&](const PackageName& name) {
    if (!seen.insert(name).second) return;
    order.push_back(name);
    if (order.size() > options.max_packages) {
      throw UniverseTooLarge("more than " + std::to_string(options.max_packages) +
                             " packages are reachable from " + root.to_string());
    }
  };
  for (const auto& name : root_seeds(index, *root_rec, migrations, options.env)) add(name);

  const MarkerEnv deps_env = transitive_env(options.env);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const PackageName current = order[i];
    for (const auto& rec : index.releases(current)) {
      for (const auto& req : rec.requires_dist) {
        if (req.name == current || !req.active(deps_env) || !index.contains(req.name)) continue;
        add(req.name);
      }
    }
  }

  std::vector<VarDomain> vars;
  vars.reserve(order.size());
  for (const auto& name : order) {
    VarDomain d{name, {}};
    for (const auto& rec : index.releases(name)) d.versions.push_back(rec.id.version);
    vars.push_back(std::move(d));
  }
  return vars;
}

std::vector<Clause> build_constraints(const PackageIndex& index, const ReleaseId& root,
                                      const std::vector<VarDomain>& vars, const CompatibilityMatrix& matrix,
                                      const std::vector<MigrationRule>& migrations, const MarkerEnv& env) {
  const ReleaseRecord* root_rec = index.find(root);
  if (!root_rec) throw UnknownRoot("release " + root.to_string() + " is not in the index");
  std::map<PackageName, std::size_t> var_index;
  for (std::size_t i = 0; i < vars.size(); ++i) var_index.emplace(vars[i].name, i);

  std::vector<Clause> clauses;
  clauses.push_back({ClauseKind::kRootPin, {{0, {vars[0].slot_of(root_rec->id.version)}}}});

  for (const auto& name : root_seeds(index, *root_rec, migrations, env)) {
    const auto j = var_index.at(name);
    clauses.push_back({ClauseKind::kRootFreedom, {{j, all_slots(vars[j])}}});
  }

  const LicenseInfo& root_license = root_rec->license;
  const bool license_checks = root_license.is_known() && matrix.contains(root_license.id());
  const MarkerEnv deps_env = transitive_env(env);

  for (std::size_t i = 1; i < vars.size(); ++i) {
    const auto& d = vars[i];
    const auto releases = index.releases(d.name);
    for (const auto& rec : releases) {
      const Slot s = d.slot_of(rec.id.version);
      if (license_checks && rec.license.is_known() && matrix.contains(rec.license.id()) &&
          matrix.incompatible(rec.license.id(), root_license.id())) {
        clauses.push_back({ClauseKind::kLicenseExclusion, {{i, all_slots_except(d, s)}}});
      }
      for (const auto& req : rec.requires_dist) {
        if (req.name == d.name || !req.active(deps_env)) continue;
        Clause c{ClauseKind::kDependency, {{i, all_slots_except(d, s)}}};
        if (const auto it = var_index.find(req.name); it != var_index.end()) {
          const auto& target = vars[it->second];
          Literal lit{it->second, {}};
          for (Slot t = -target.k(); t < 0; ++t) {
            if (constraint_matches(target.version_at(t), req.specifiers)) lit.allowed.push_back(t);
          }
          if (!lit.allowed.empty()) c.literals.push_back(std::move(lit));
        }
        clauses.push_back(std::move(c));
      }
    }
  }
  return clauses;
}

SolverProblem make_problem(const PackageIndex& index, const ReleaseId& root, const CompatibilityMatrix& matrix,
                           const std::vector<MigrationRule>& migrations, const CostModel& cost,
                           const VarsOptions& options) {
  SolverProblem p;
  const ReleaseRecord* root_rec = index.find(root);
  if (!root_rec) throw UnknownRoot("release " + root.to_string() + " is not in the index");
  p.root = root_rec->id;
  p.vars = build_vars(index, root, migrations, options);
  for (std::size_t i = 0; i < p.vars.size(); ++i) p.var_index.emplace(p.vars[i].name, i);
  p.clauses = build_constraints(index, root, p.vars, matrix, migrations, options.env);
  p.cost = cost;
  p.migrations = migrations;
  p.env = options.env;
  return p;
}

// ---------------------------------------------------------------------------
// Objective

bool satisfies(const Clause& clause, const Assignment& x) {
  return std::any_of(clause.literals.begin(), clause.literals.end(), [&](const Literal& lit) {
    return std::binary_search(lit.allowed.begin(), lit.allowed.end(), x[lit.var]);
  });
}

std::optional<std::size_t> first_violation(const std::vector<Clause>& clauses, const Assignment& x) {
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (!satisfies(clauses[i], x)) return i;
  }
  return std::nullopt;
}

Assignment baseline_assignment(const SolverProblem& problem, const DependencyGraph& baseline) {
  Assignment b(problem.vars.size(), 0);
  for (const auto& id : baseline.nodes) {
    if (const auto i = problem.find(id.name)) b[*i] = problem.vars[*i].slot_of(id.version);
  }
  return b;
}

std::vector<MigrationPair> pair_migrations(const SolverProblem& problem, const Assignment& baseline,
                                           const Assignment& x) {
  std::vector<MigrationPair> pairs;
  if (problem.migrations.empty()) return pairs;
  std::vector<std::size_t> added;
  for (const auto& [name, i] : problem.var_index) {
    if (baseline[i] == 0 && x[i] != 0) added.push_back(i);
  }
  std::vector<bool> taken(problem.vars.size(), false);
  for (const auto& [name, i] : problem.var_index) {
    if (baseline[i] == 0 || x[i] != 0) continue;
    for (const auto j : added) {
      if (taken[j]) continue;
      const MigrationRule rule{name, problem.vars[j].name};
      if (std::find(problem.migrations.begin(), problem.migrations.end(), rule) != problem.migrations.end()) {
        taken[j] = true;
        pairs.push_back({i, j});
        break;
      }
    }
  }
  return pairs;
}

std::int64_t objective(const SolverProblem& problem, const Assignment& baseline, const Assignment& x) {
  const auto pairs = pair_migrations(problem, baseline, x);
  std::vector<bool> paired(problem.vars.size(), false);
  for (const auto& p : pairs) paired[p.source] = paired[p.target] = true;
  std::int64_t cost = static_cast<std::int64_t>(pairs.size()) * problem.cost.c_migration;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (baseline[i] == x[i] || paired[i]) continue;
    if (x[i] == 0) {
      cost += problem.cost.c_removal;
    } else {
      cost += std::abs(x[i] - baseline[i]);  // baseline 0 makes this the addition cost |x|
    }
  }
  return cost;
}

std::vector<PackageName> changed_packages(const SolverProblem& problem, const Assignment& baseline,
                                          const Assignment& x) {
  std::vector<PackageName> out;
  for (const auto& [name, i] : problem.var_index) {
    if (baseline[i] != x[i]) out.push_back(name);
  }
  return out;
}

Clause exclusion_clause(const SolverProblem& problem, const Assignment& baseline, const Assignment& x) {
  Clause c{ClauseKind::kSolutionExclusion, {}};
  for (std::size_t i = 0; i < problem.vars.size(); ++i) {
    if (baseline[i] != x[i] && x[i] != 0) c.literals.push_back({i, {0}});
  }
  return c;
}

// ---------------------------------------------------------------------------
// Branch and bound

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const SolverProblem& problem, const Assignment& baseline, const std::vector<Clause>& extra,
                 const SolveOptions& options, SolveStats* stats)
      : p_(problem), baseline_(baseline), options_(options), stats_(stats) {
    const std::size_t n = p_.vars.size();
    offset_.resize(n);
    nwords_.resize(n);
    std::size_t total = 0;
    for (std::size_t v = 0; v < n; ++v) {
      offset_[v] = total;
      nwords_[v] = (values(v) + 63) / 64;
      total += nwords_[v];
    }
    dom_.assign(total, 0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < values(v); ++i) dom_[offset_[v] + i / 64] |= std::uint64_t{1} << (i % 64);
    }

    var_clauses_.resize(n);
    for (const auto* list : {&p_.clauses, &extra}) {
      for (const auto& c : *list) compile(c);
    }
    queued_.assign(clauses_.size(), false);

    build_costs();
    minc_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      minc_[v] = min_cost(v);
      lb_ += minc_[v];
    }
  }

  std::optional<Assignment> run() {
    start_ = std::chrono::steady_clock::now();
    if (has_empty_clause_) return std::nullopt;
    for (std::size_t c = 0; c < clauses_.size(); ++c) enqueue(c);
    if (!propagate()) return std::nullopt;
    search();
    return best_;
  }

 private:
  struct CompiledLiteral {
    std::size_t var;
    std::size_t mask;  // offset into masks_
  };
  struct CompiledClause {
    std::vector<CompiledLiteral> literals;
  };
  struct TrailEntry {
    std::size_t var;
    std::size_t saved;  // offset into saved_
    std::int64_t minc;
  };

  std::size_t values(std::size_t v) const { return p_.vars[v].versions.size() + 1; }
  // Value index i < k is slot i - k; index k is the absent value.
  Slot slot(std::size_t v, std::size_t i) const {
    const auto k = p_.vars[v].versions.size();
    return i == k ? 0 : static_cast<Slot>(i) - static_cast<Slot>(k);
  }
  std::size_t index_of(std::size_t v, Slot s) const {
    const auto k = p_.vars[v].versions.size();
    return s == 0 ? k : static_cast<std::size_t>(static_cast<Slot>(k) + s);
  }

  void compile(const Clause& c) {
    if (c.literals.empty()) {
      has_empty_clause_ = true;
      return;
    }
    CompiledClause out;
    for (const auto& lit : c.literals) {
      const std::size_t off = masks_.size();
      masks_.resize(off + nwords_[lit.var], 0);
      for (const Slot s : lit.allowed) {
        if (s < -p_.vars[lit.var].k() || s > 0) continue;
        const auto i = index_of(lit.var, s);
        masks_[off + i / 64] |= std::uint64_t{1} << (i % 64);
      }
      out.literals.push_back({lit.var, off});
    }
    const std::size_t id = clauses_.size();
    for (const auto& lit : out.literals) {
      auto& list = var_clauses_[lit.var];
      if (list.empty() || list.back() != id) list.push_back(id);
    }
    clauses_.push_back(std::move(out));
  }

  void build_costs() {
    const std::size_t n = p_.vars.size();
    std::vector<bool> source(n, false), target(n, false);
    for (const auto& rule : p_.migrations) {
      const auto s = p_.find(rule.source);
      const auto t = p_.find(rule.target);
      if (!s || !t) continue;
      if (baseline_[*s] != 0) source[*s] = true;
      if (baseline_[*s] != 0) target[*t] = true;
    }
    const std::int64_t removal = p_.cost.c_removal;
    const std::int64_t migration_share = std::min(p_.cost.c_migration, p_.cost.c_removal);
    cost_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      const Slot b = baseline_[v];
      cost_[v].resize(values(v));
      for (std::size_t i = 0; i < values(v); ++i) {
        const Slot s = slot(v, i);
        std::int64_t c;
        if (b != 0) {
          c = s == 0 ? (source[v] ? migration_share : removal) : std::abs(s - b);
        } else {
          c = s == 0 || target[v] ? 0 : std::abs(s);
        }
        cost_[v][i] = c;
      }
      auto& order = by_cost_desc_.emplace_back(values(v));
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return cost_[v][a] > cost_[v][b]; });
    }
  }

  bool bit(std::size_t v, std::size_t i) const { return (dom_[offset_[v] + i / 64] >> (i % 64)) & 1u; }

  std::size_t domain_size(std::size_t v) const {
    std::size_t n = 0;
    for (std::size_t w = 0; w < nwords_[v]; ++w) n += static_cast<std::size_t>(std::popcount(dom_[offset_[v] + w]));
    return n;
  }

  std::int64_t min_cost(std::size_t v) const {
    std::int64_t best = INT64_MAX;
    for (std::size_t i = 0; i < values(v); ++i) {
      if (bit(v, i)) best = std::min(best, cost_[v][i]);
    }
    return best;
  }

  void enqueue(std::size_t c) {
    if (queued_[c]) return;
    queued_[c] = true;
    queue_.push_back(c);
  }

  // dom(v) &= mask. Returns false on wipe-out.
  bool restrict(std::size_t v, const std::uint64_t* mask) {
    bool changed = false;
    bool nonempty = false;
    for (std::size_t w = 0; w < nwords_[v]; ++w) {
      const auto cur = dom_[offset_[v] + w];
      if ((cur & mask[w]) != cur) changed = true;
      if (cur & mask[w]) nonempty = true;
    }
    if (!nonempty) return false;
    if (!changed) return true;
    set_domain(v, mask, true);
    return true;
  }

  void set_domain(std::size_t v, const std::uint64_t* words, bool intersect) {
    const std::size_t saved = saved_.size();
    saved_.insert(saved_.end(), dom_.begin() + static_cast<std::ptrdiff_t>(offset_[v]),
                  dom_.begin() + static_cast<std::ptrdiff_t>(offset_[v] + nwords_[v]));
    trail_.push_back({v, saved, minc_[v]});
    for (std::size_t w = 0; w < nwords_[v]; ++w) {
      if (intersect) {
        dom_[offset_[v] + w] &= words[w];
      } else {
        dom_[offset_[v] + w] = words[w];
      }
    }
    const auto m = min_cost(v);
    lb_ += m - minc_[v];
    minc_[v] = m;
    for (const auto c : var_clauses_[v]) enqueue(c);
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      const auto e = trail_.back();
      trail_.pop_back();
      std::copy(saved_.begin() + static_cast<std::ptrdiff_t>(e.saved),
                saved_.begin() + static_cast<std::ptrdiff_t>(e.saved + nwords_[e.var]),
                dom_.begin() + static_cast<std::ptrdiff_t>(offset_[e.var]));
      saved_.resize(e.saved);
      lb_ += e.minc - minc_[e.var];
      minc_[e.var] = e.minc;
    }
  }

  bool propagate() {
    while (!queue_.empty()) {
      const auto c = queue_.front();
      queue_.pop_front();
      queued_[c] = false;
      const auto& clause = clauses_[c];
      const CompiledLiteral* open = nullptr;
      std::size_t open_count = 0;
      bool satisfied = false;
      for (const auto& lit : clause.literals) {
        bool meets = false;
        bool within = true;
        for (std::size_t w = 0; w < nwords_[lit.var]; ++w) {
          const auto d = dom_[offset_[lit.var] + w];
          const auto m = masks_[lit.mask + w];
          if (d & m) meets = true;
          if (d & ~m) within = false;
        }
        if (within) {
          satisfied = true;
          break;
        }
        if (meets) {
          open = &lit;
          ++open_count;
        }
      }
      if (satisfied || open_count > 1) continue;
      if (open_count == 0 || !restrict(open->var, &masks_[open->mask])) {
        for (const auto q : queue_) queued_[q] = false;
        queue_.clear();
        return false;
      }
    }
    return true;
  }

  void check_time() {
    if (((stats_nodes_ - 1) & 255u) != 0) return;
    if (std::chrono::steady_clock::now() - start_ > options_.timeout) {
      throw SolverTimeout("solver exceeded its " + std::to_string(options_.timeout.count()) + " ms budget");
    }
  }

  bool better(std::int64_t cost, const Assignment& x) const {
    if (!best_) return true;
    if (cost != best_cost_) return cost < best_cost_;
    const auto names = changed_packages(p_, baseline_, x);
    if (names != best_names_) return names < best_names_;
    return x < *best_;
  }

  void consider(Assignment x) {
    if (stats_) ++stats_->leaves;
    const auto cost = objective(p_, baseline_, x);
    if (better(cost, x)) {
      best_names_ = changed_packages(p_, baseline_, x);
      best_cost_ = cost;
      best_ = std::move(x);
    }
  }

  // Drops values that alone would push the bound past the incumbent.
  bool filter_by_cost() {
    if (!best_) return true;
    std::vector<std::uint64_t> keep;
    for (std::size_t v = 0; v < p_.vars.size(); ++v) {
      const std::int64_t slack = best_cost_ - (lb_ - minc_[v]);
      bool drop = false;
      for (const auto i : by_cost_desc_[v]) {
        if (cost_[v][i] <= slack) break;
        if (bit(v, i)) {
          drop = true;
          break;
        }
      }
      if (!drop) continue;
      keep.assign(dom_.begin() + static_cast<std::ptrdiff_t>(offset_[v]),
                  dom_.begin() + static_cast<std::ptrdiff_t>(offset_[v] + nwords_[v]));
      for (const auto i : by_cost_desc_[v]) {
        if (cost_[v][i] <= slack) break;
        keep[i / 64] &= ~(std::uint64_t{1} << (i % 64));
      }
      if (!restrict(v, keep.data())) return false;
    }
    return true;
  }

  // Cheapest value still allowed: the baseline value when possible, else
  // the lowest index among the cheapest.
  std::size_t default_index(std::size_t v) const {
    const std::size_t b = index_of(v, baseline_[v]);
    if (bit(v, b)) return b;
    for (std::size_t i = 0; i < values(v); ++i) {
      if (bit(v, i) && cost_[v][i] == minc_[v]) return i;
    }
    return b;
  }

  // Another value as cheap as the baseline one is still open.
  bool ambiguous(std::size_t v) const {
    const std::size_t b = index_of(v, baseline_[v]);
    if (!bit(v, b)) return false;
    for (std::size_t i = 0; i < values(v); ++i) {
      if (i != b && bit(v, i) && cost_[v][i] == 0) return true;
    }
    return false;
  }

  bool literal_holds(const CompiledLiteral& lit, std::size_t i) const {
    return (masks_[lit.mask + i / 64] >> (i % 64)) & 1u;
  }

  // Cheapest bound increase that makes `lit` true.
  std::int64_t repair_cost(const CompiledLiteral& lit) const {
    std::int64_t best = INT64_MAX;
    for (std::size_t i = 0; i < values(lit.var); ++i) {
      if (bit(lit.var, i) && literal_holds(lit, i)) best = std::min(best, cost_[lit.var][i]);
    }
    return best == INT64_MAX ? best : best - minc_[lit.var];
  }

  bool literal_open(const CompiledLiteral& lit) const {
    for (std::size_t w = 0; w < nwords_[lit.var]; ++w) {
      if (dom_[offset_[lit.var] + w] & masks_[lit.mask + w]) return true;
    }
    return false;
  }

  // Cost filtering to a fixpoint. Changes are undone by the caller.
  bool settle() {
    for (;;) {
      const auto before = trail_.size();
      if (!filter_by_cost() || !propagate()) return false;
      if (trail_.size() == before) return true;
    }
  }

  void branch_on_values(std::size_t var) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < values(var); ++i) {
      if (bit(var, i)) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (cost_[var][a] != cost_[var][b]) return cost_[var][a] < cost_[var][b];
      return a > b;
    });
    std::vector<std::uint64_t> single(nwords_[var]);
    for (const auto i : order) {
      if (best_ && lb_ - minc_[var] + cost_[var][i] > best_cost_) continue;
      const auto mark = trail_.size();
      std::fill(single.begin(), single.end(), 0);
      single[i / 64] = std::uint64_t{1} << (i % 64);
      set_domain(var, single.data(), false);
      if (propagate()) search();
      undo(mark);
    }
  }

  struct Probe {
    std::vector<const CompiledLiteral*> open;
    std::vector<std::pair<std::int64_t, std::size_t>> ranked;  // (bound, branch)
    std::vector<std::size_t> raised;  // variables whose cheapest cost rises in some branch
    std::int64_t bound() const { return ranked.empty() ? INT64_MAX : ranked.front().first; }
  };

  // Branch j makes literal j true and every earlier open literal false.
  bool enter(const Probe& probe, std::size_t j) {
    for (std::size_t i = 0; i < j; ++i) {
      const auto& lit = *probe.open[i];
      negated_.assign(masks_.begin() + static_cast<std::ptrdiff_t>(lit.mask),
                      masks_.begin() + static_cast<std::ptrdiff_t>(lit.mask + nwords_[lit.var]));
      for (auto& w : negated_) w = ~w;
      if (!restrict(lit.var, negated_.data())) return false;
    }
    if (restrict(probe.open[j]->var, &masks_[probe.open[j]->mask]) && propagate()) return true;
    return false;
  }

  void abandon() {
    for (const auto q : queue_) queued_[q] = false;
    queue_.clear();
  }

  Probe probe(const CompiledClause& clause) {
    Probe out;
    for (const auto& lit : clause.literals) {
      if (literal_open(lit)) out.open.push_back(&lit);
    }
    for (std::size_t j = 0; j < out.open.size(); ++j) {
      const auto mark = trail_.size();
      touched_.clear();
      if (enter(out, j)) {
        out.ranked.emplace_back(lb_, j);
        for (std::size_t t = mark; t < trail_.size(); ++t) touched_.emplace_back(trail_[t].var, minc_[trail_[t].var]);
      } else {
        abandon();
      }
      undo(mark);
      for (const auto& [v, m] : touched_) {
        if (m > minc_[v]) out.raised.push_back(v);
      }
    }
    std::stable_sort(out.ranked.begin(), out.ranked.end());
    std::sort(out.raised.begin(), out.raised.end());
    out.raised.erase(std::unique(out.raised.begin(), out.raised.end()), out.raised.end());
    return out;
  }

  void branch_on_clause(const Probe& probe) {
    for (const auto& [bound, j] : probe.ranked) {
      if (best_ && bound > best_cost_) break;
      const auto mark = trail_.size();
      if (enter(probe, j)) {
        search();
      } else {
        abandon();
      }
      undo(mark);
    }
  }

  // At lb == incumbent cost every optimal completion changes exactly the
  // packages whose baseline value is gone and is slot-wise no smaller than
  // the cheapest completion.
  bool cannot_beat_on_ties(const std::vector<std::size_t>& pick) const {
    for (std::size_t v = 0; v < p_.vars.size(); ++v) {
      if (domain_size(v) > 1 && ambiguous(v)) return false;
    }
    std::vector<PackageName> forced;
    for (const auto& [name, v] : p_.var_index) {
      if (!bit(v, index_of(v, baseline_[v]))) forced.push_back(name);
    }
    if (forced != best_names_) return best_names_ < forced;
    Assignment x(p_.vars.size());
    for (std::size_t v = 0; v < x.size(); ++v) x[v] = slot(v, pick[v]);
    return !(x < *best_);
  }

  void search() {
    ++stats_nodes_;
    if (stats_) ++stats_->nodes;
    check_time();
    if (best_ && lb_ > best_cost_) return;
    if (!settle()) return;

    const std::size_t n = p_.vars.size();
    std::vector<std::size_t> pick(n);
    for (std::size_t v = 0; v < n; ++v) pick[v] = default_index(v);
    if (best_ && lb_ == best_cost_ && cannot_beat_on_ties(pick)) return;

    // Violated clauses over pairwise disjoint variables each need their own
    // repair, so their cheapest repairs add up on top of the bound.
    violated_.clear();
    std::int64_t extra = 0;
    used_.assign(n, false);
    for (std::size_t c = 0; c < clauses_.size(); ++c) {
      const auto& clause = clauses_[c];
      const bool holds = std::any_of(clause.literals.begin(), clause.literals.end(),
                                     [&](const CompiledLiteral& lit) { return literal_holds(lit, pick[lit.var]); });
      if (holds) continue;
      violated_.push_back(c);
      if (!best_) continue;
      const bool disjoint = std::none_of(clause.literals.begin(), clause.literals.end(),
                                         [&](const CompiledLiteral& lit) { return used_[lit.var]; });
      if (!disjoint) continue;
      std::int64_t repair = INT64_MAX;
      for (const auto& lit : clause.literals) repair = std::min(repair, repair_cost(lit));
      if (repair == INT64_MAX) return;
      if (repair == 0) continue;
      for (const auto& lit : clause.literals) used_[lit.var] = true;
      extra += repair;
      if (lb_ + extra > best_cost_) return;
    }
    if (!violated_.empty()) {
      // Branch on the clause whose cheapest repair raises the bound most.
      // Clauses whose probes raise disjoint variables add up as well.
      const std::vector<std::size_t> candidates = violated_;
      std::optional<Probe> chosen;
      std::vector<bool> claimed(n, false);
      std::int64_t gain = 0;
      for (std::size_t k = 0; k < candidates.size() && k < kProbeLimit; ++k) {
        auto pr = probe(clauses_[candidates[k]]);
        if (pr.ranked.empty() || (best_ && pr.bound() > best_cost_)) return;
        if (best_ && std::none_of(pr.raised.begin(), pr.raised.end(), [&](std::size_t v) { return claimed[v]; })) {
          for (const auto v : pr.raised) claimed[v] = true;
          gain += pr.bound() - lb_;
          if (lb_ + gain > best_cost_) return;
        }
        if (!chosen || pr.bound() > chosen->bound() ||
            (pr.bound() == chosen->bound() && pr.ranked.size() < chosen->ranked.size())) {
          chosen = std::move(pr);
        }
      }
      branch_on_clause(*chosen);
      return;
    }

    Assignment x(n);
    for (std::size_t v = 0; v < n; ++v) x[v] = slot(v, pick[v]);
    const bool exact = objective(p_, baseline_, x) == lb_;
    consider(std::move(x));

    // The cheapest completion is feasible; it is the best one below this
    // node unless migrations make the bound loose or leave equal-cost
    // alternatives open.
    std::size_t var = n;
    for (std::size_t v = 0; v < n && var == n; ++v) {
      if (domain_size(v) > 1 && ambiguous(v)) var = v;
    }
    if (var == n && exact) return;
    for (std::size_t v = 0; v < n && var == n; ++v) {
      if (domain_size(v) > 1) var = v;
    }
    if (var != n) branch_on_values(var);
  }

  const SolverProblem& p_;
  const Assignment& baseline_;
  SolveOptions options_;
  SolveStats* stats_;

  std::vector<std::size_t> offset_, nwords_;
  std::vector<std::uint64_t> dom_;
  std::vector<std::uint64_t> masks_;
  std::vector<CompiledClause> clauses_;
  std::vector<std::vector<std::size_t>> var_clauses_;
  bool has_empty_clause_ = false;

  std::deque<std::size_t> queue_;
  std::vector<bool> queued_;
  std::vector<bool> used_;
  std::vector<std::size_t> violated_;
  std::vector<std::uint64_t> negated_;
  std::vector<std::pair<std::size_t, std::int64_t>> touched_;
  static constexpr std::size_t kProbeLimit = 64;

  std::vector<std::vector<std::int64_t>> cost_;
  std::vector<std::vector<std::size_t>> by_cost_desc_;
  std::vector<std::int64_t> minc_;
  std::int64_t lb_ = 0;

  std::vector<TrailEntry> trail_;
  std::vector<std::uint64_t> saved_;

  std::optional<Assignment> best_;
  std::int64_t best_cost_ = 0;
  std::vector<PackageName> best_names_;

  std::chrono::steady_clock::time_point start_;
  std::uint64_t stats_nodes_ = 0;
};

}  // namespace

std::optional<Assignment> find_optimal(const SolverProblem& problem, const Assignment& baseline,
                                       const std::vector<Clause>& extra, const SolveOptions& options,
                                       SolveStats* stats) {
  if (problem.vars.empty()) return std::nullopt;
  BranchAndBound bb(problem, baseline, extra, options, stats);
  return bb.run();
}

// ---------------------------------------------------------------------------
// Plans

std::string_view to_string(RemediationAction::Kind kind) {
  switch (kind) {
    case RemediationAction::Kind::kChangeLicense: return "change-license";
    case RemediationAction::Kind::kMigrate: return "migrate";
    case RemediationAction::Kind::kRemove: return "remove";
    case RemediationAction::Kind::kPin: return "pin";
  }
  return "?";
}

namespace {

std::string join_alternatives(const std::vector<SpdxId>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += items.size() == 2 ? " or " : (i + 1 == items.size() ? ", or " : ", ");
    out += items[i];
  }
  return out;
}

}  // namespace

std::string RemediationAction::to_string() const {
  switch (kind) {
    case Kind::kChangeLicense: return "Change project license to " + join_alternatives(licenses);
    case Kind::kMigrate: return "Migrate " + package.str() + " to " + target.str();
    case Kind::kRemove: return "Remove " + package.str();
    case Kind::kPin: return "Pin " + package.str() + " to " + (version ? version->raw() : std::string("?"));
  }
  return {};
}

std::vector<RemediationAction> diff_to_actions(const SolverProblem& problem, const DependencyGraph& baseline,
                                               const Assignment& x) {
  if (x.size() != problem.vars.size()) throw InconsistentSolution("assignment size does not match the variables");
  if (const auto bad = first_violation(problem.clauses, x)) {
    throw InconsistentSolution("assignment violates a " + std::string(to_string(problem.clauses[*bad].kind)) +
                               " clause");
  }
  const Assignment b = baseline_assignment(problem, baseline);

  std::map<PackageName, int> depth;
  for (const auto& [id, d] : node_depths(baseline)) depth[id.name] = d;
  std::set<PackageName> direct;
  if (baseline.contains(baseline.root)) {
    for (const auto& id : baseline.edges.at(baseline.root)) direct.insert(id.name);
  }
  auto depth_of = [&](const PackageName& name) -> std::optional<int> {
    const auto it = depth.find(name);
    if (it == depth.end()) return std::nullopt;
    return it->second;
  };

  std::vector<RemediationAction> actions;
  std::vector<bool> paired(x.size(), false);
  for (const auto& pair : pair_migrations(problem, b, x)) {
    paired[pair.source] = paired[pair.target] = true;
    RemediationAction a;
    a.kind = RemediationAction::Kind::kMigrate;
    a.package = problem.vars[pair.source].name;
    a.target = problem.vars[pair.target].name;
    a.version = problem.vars[pair.target].version_at(x[pair.target]);
    a.depth = depth_of(a.package);
    actions.push_back(std::move(a));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (b[i] == x[i] || paired[i]) continue;
    RemediationAction a;
    a.package = problem.vars[i].name;
    if (x[i] == 0) {
      a.kind = RemediationAction::Kind::kRemove;
    } else {
      a.kind = RemediationAction::Kind::kPin;
      a.version = problem.vars[i].version_at(x[i]);
    }
    a.depth = depth_of(a.package);
    actions.push_back(std::move(a));
  }
  std::stable_sort(actions.begin(), actions.end(), [&](const RemediationAction& l, const RemediationAction& r) {
    const bool ld = direct.count(l.package) > 0;
    const bool rd = direct.count(r.package) > 0;
    if (ld != rd) return ld;
    const int lx = l.depth.value_or(INT_MAX);
    const int rx = r.depth.value_or(INT_MAX);
    if (lx != rx) return lx < rx;
    return l.package < r.package;
  });
  return actions;
}

DependencyGraph graph_from_assignment(const SolverProblem& problem, const PackageIndex& index,
                                      const DependencyGraph& baseline, const Assignment& x) {
  DependencyGraph g;
  g.root = problem.root;
  g.resolved_at = baseline.resolved_at;

  std::map<PackageName, const ReleaseRecord*> chosen;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    if (const auto* rec = index.find(problem.vars[i].name, problem.vars[i].version_at(x[i]))) {
      chosen.emplace(rec->id.name, rec);
    }
  }
  const MarkerEnv deps_env = transitive_env(problem.env);

  auto expand = [&](const ReleaseRecord* start) {
    std::deque<const ReleaseRecord*> queue{start};
    g.add_node(start->id, start->license);
    while (!queue.empty()) {
      const ReleaseRecord* cur = queue.front();
      queue.pop_front();
      const MarkerEnv& env = cur->id == problem.root ? problem.env : deps_env;
      for (const auto& req : cur->requires_dist) {
        if (!req.active(env) || req.name == cur->id.name) continue;
        const auto it = chosen.find(req.name);
        if (it == chosen.end()) {
          if (!problem.find(req.name)) g.unresolved.push_back({cur->id, req, std::string(kUnsatisfiable)});
          continue;
        }
        const ReleaseRecord* next = it->second;
        if (!constraint_matches(next->id.version, req.specifiers, true)) {
          g.unresolved.push_back({cur->id, req, std::string(kConflictIgnored)});
        }
        if (!g.contains(next->id)) {
          g.add_node(next->id, next->license);
          queue.push_back(next);
        }
        g.add_edge(cur->id, next->id);
      }
    }
  };

  const auto root_it = chosen.find(problem.root.name);
  if (root_it == chosen.end()) throw InconsistentSolution("root is absent from the assignment");
  expand(root_it->second);
  for (const auto& var : problem.vars) {
    const auto it = chosen.find(var.name);
    if (it != chosen.end() && !g.contains(it->second->id)) expand(it->second);
  }
  return g;
}

std::vector<RemediationPlan> solve_top_n(const SolverProblem& problem, const PackageIndex& index,
                                         const DependencyGraph& baseline, int n, const SolveOptions& options) {
  const Assignment b = baseline_assignment(problem, baseline);
  std::vector<Clause> exclusions;
  std::vector<RemediationPlan> plans;
  while (static_cast<int>(plans.size()) < n) {
    auto x = find_optimal(problem, b, exclusions, options);
    if (!x) break;
    RemediationPlan plan;
    plan.actions = diff_to_actions(problem, baseline, *x);
    plan.total_cost = objective(problem, b, *x);
    plan.resulting_graph = graph_from_assignment(problem, index, baseline, *x);
    exclusions.push_back(exclusion_clause(problem, b, *x));
    plan.assignment = std::move(*x);
    plans.push_back(std::move(plan));
  }
  if (plans.empty()) throw NoSolution("no assignment satisfies the constraints for " + problem.root.to_string());
  return plans;
}

std::vector<SpdxId> compatible_licenses(const DependencyGraph& g, const CompatibilityMatrix& matrix,
                                        const std::map<SpdxId, std::size_t>& popularity, int m_limit,
                                        std::vector<std::string>* warnings) {
  std::vector<SpdxId> constraining;
  for (const auto& id : g.nodes) {
    if (id == g.root) continue;
    const LicenseInfo lic = g.license_of(id);
    if (!lic.is_known()) {
      if (warnings) warnings->push_back(id.name.str() + " " + id.version.raw() + " has an unrecognizable license");
      continue;
    }
    if (!matrix.contains(lic.id())) {
      if (warnings) {
        warnings->push_back(id.name.str() + " " + id.version.raw() + " uses " + lic.id() +
                            ", which is not in the compatibility matrix");
      }
      continue;
    }
    if (std::find(constraining.begin(), constraining.end(), lic.id()) == constraining.end()) {
      constraining.push_back(lic.id());
    }
  }

  std::vector<SpdxId> out;
  for (const auto& candidate : matrix.licenses()) {
    const bool ok = std::none_of(constraining.begin(), constraining.end(),
                                 [&](const SpdxId& dep) { return matrix.incompatible(dep, candidate); });
    if (ok) out.push_back(candidate);
  }
  auto count = [&](const SpdxId& id) {
    const auto it = popularity.find(id);
    return it == popularity.end() ? std::size_t{0} : it->second;
  };
  std::stable_sort(out.begin(), out.end(), [&](const SpdxId& a, const SpdxId& b) {
    if (count(a) != count(b)) return count(a) > count(b);
    return a < b;
  });
  if (m_limit >= 0 && out.size() > static_cast<std::size_t>(m_limit)) out.resize(static_cast<std::size_t>(m_limit));
  return out;
}

RemediationOutcome remediate(const PackageIndex& index, const ReleaseId& root, Timestamp t,
                             const CompatibilityMatrix& matrix, const std::vector<MigrationRule>& migrations,
                             const RemediationOptions& options) {
  return remediate_graph(index, resolve(index, root, t, options.env), matrix, migrations, options);
}

RemediationOutcome remediate_graph(const PackageIndex& index, DependencyGraph baseline,
                                   const CompatibilityMatrix& matrix, const std::vector<MigrationRule>& migrations,
                                   const RemediationOptions& options) {
  RemediationOutcome out;
  const ReleaseId root = baseline.root;
  out.baseline = std::move(baseline);
  out.detection = detect(out.baseline, matrix);
  out.needed = out.detection.label == CompatibilityLabel::kIncompatible;
  if (!out.needed) return out;

  for (const auto& w : lint_cost_model(options.cost)) out.warnings.push_back(w);
  out.licenses =
      compatible_licenses(out.baseline, matrix, index.license_popularity(), options.m_licenses, &out.warnings);

  VarsOptions vars_options;
  vars_options.max_packages = options.max_packages;
  vars_options.env = options.env;
  const SolverProblem problem = make_problem(index, root, matrix, migrations, options.cost, vars_options);
  try {
    out.plans = solve_top_n(problem, index, out.baseline, options.n_plans, options.solve);
  } catch (const NoSolution&) {
    out.plans.clear();
  }
  return out;
}

}  // namespace licremedy
