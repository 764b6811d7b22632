#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "licremedy/licremedy.hpp"

namespace licremedy::cli {

using nlohmann::json;

std::optional<std::string> process_env(const std::string& name) {
  const char* value = std::getenv(name.c_str());
  if (!value) return std::nullopt;
  return std::string(value);
}

namespace {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string index_path;
  std::string matrix_path;
  std::string keywords_path;
  std::string migrations_path;
  std::string at = "now";
  std::vector<std::string> extras;
  int n_plans = 5;
  int m_licenses = 3;
  std::int64_t c_migration = 10;
  std::int64_t c_removal = 100;
  int timeout_secs = 300;
  std::string format = "text";
  unsigned threads = 0;
  std::size_t max_packages = 2000;
  std::string cache_dir;
  std::string registry = "https://pypi.org";
};

// Command-line values; unset ones leave lower layers in place.
struct CliValues {
  std::optional<std::string> config_path;
  std::optional<std::string> index_path, matrix_path, keywords_path, migrations_path, at, format, cache_dir,
      registry;
  std::vector<std::string> extras;
  std::optional<int> n_plans, m_licenses, timeout_secs;
  std::optional<std::int64_t> c_migration, c_removal;
  std::optional<unsigned> threads;
  std::optional<std::size_t> max_packages;
};

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || !in.eof()) throw ConfigError(what + ": '" + text + "' is not a valid number");
  return value;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void apply_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "index") {
        cfg.index_path = value.get<std::string>();
      } else if (key == "matrix") {
        cfg.matrix_path = value.get<std::string>();
      } else if (key == "keywords") {
        cfg.keywords_path = value.get<std::string>();
      } else if (key == "migrations") {
        cfg.migrations_path = value.get<std::string>();
      } else if (key == "at") {
        cfg.at = value.get<std::string>();
      } else if (key == "extras") {
        cfg.extras = value.get<std::vector<std::string>>();
      } else if (key == "n") {
        cfg.n_plans = value.get<int>();
      } else if (key == "m") {
        cfg.m_licenses = value.get<int>();
      } else if (key == "c_migration") {
        cfg.c_migration = value.get<std::int64_t>();
      } else if (key == "c_removal") {
        cfg.c_removal = value.get<std::int64_t>();
      } else if (key == "timeout") {
        cfg.timeout_secs = value.get<int>();
      } else if (key == "format") {
        cfg.format = value.get<std::string>();
      } else if (key == "threads") {
        cfg.threads = value.get<unsigned>();
      } else if (key == "max_packages") {
        cfg.max_packages = value.get<std::size_t>();
      } else if (key == "cache_dir") {
        cfg.cache_dir = value.get<std::string>();
      } else if (key == "registry") {
        cfg.registry = value.get<std::string>();
      } else {
        throw ConfigError("config file " + path + ": unknown key '" + key + "'");
      }
    }
  } catch (const json::type_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

void apply_env(RunConfig& cfg, const EnvLookup& env) {
  auto get = [&](const char* name) { return env(std::string("LICREMEDY_") + name); };
  if (auto v = get("INDEX")) cfg.index_path = *v;
  if (auto v = get("MATRIX")) cfg.matrix_path = *v;
  if (auto v = get("KEYWORDS")) cfg.keywords_path = *v;
  if (auto v = get("MIGRATIONS")) cfg.migrations_path = *v;
  if (auto v = get("AT")) cfg.at = *v;
  if (auto v = get("EXTRAS")) cfg.extras = split_list(*v);
  if (auto v = get("N")) cfg.n_plans = parse_number<int>(*v, "LICREMEDY_N");
  if (auto v = get("M")) cfg.m_licenses = parse_number<int>(*v, "LICREMEDY_M");
  if (auto v = get("C_MIGRATION")) cfg.c_migration = parse_number<std::int64_t>(*v, "LICREMEDY_C_MIGRATION");
  if (auto v = get("C_REMOVAL")) cfg.c_removal = parse_number<std::int64_t>(*v, "LICREMEDY_C_REMOVAL");
  if (auto v = get("TIMEOUT")) cfg.timeout_secs = parse_number<int>(*v, "LICREMEDY_TIMEOUT");
  if (auto v = get("FORMAT")) cfg.format = *v;
  if (auto v = get("THREADS")) cfg.threads = parse_number<unsigned>(*v, "LICREMEDY_THREADS");
  if (auto v = get("MAX_PACKAGES")) cfg.max_packages = parse_number<std::size_t>(*v, "LICREMEDY_MAX_PACKAGES");
  if (auto v = get("CACHE_DIR")) cfg.cache_dir = *v;
  if (auto v = get("REGISTRY")) cfg.registry = *v;
}

void apply_cli(RunConfig& cfg, const CliValues& cli) {
  if (cli.index_path) cfg.index_path = *cli.index_path;
  if (cli.matrix_path) cfg.matrix_path = *cli.matrix_path;
  if (cli.keywords_path) cfg.keywords_path = *cli.keywords_path;
  if (cli.migrations_path) cfg.migrations_path = *cli.migrations_path;
  if (cli.at) cfg.at = *cli.at;
  if (!cli.extras.empty()) cfg.extras = cli.extras;
  if (cli.n_plans) cfg.n_plans = *cli.n_plans;
  if (cli.m_licenses) cfg.m_licenses = *cli.m_licenses;
  if (cli.c_migration) cfg.c_migration = *cli.c_migration;
  if (cli.c_removal) cfg.c_removal = *cli.c_removal;
  if (cli.timeout_secs) cfg.timeout_secs = *cli.timeout_secs;
  if (cli.format) cfg.format = *cli.format;
  if (cli.threads) cfg.threads = *cli.threads;
  if (cli.max_packages) cfg.max_packages = *cli.max_packages;
  if (cli.cache_dir) cfg.cache_dir = *cli.cache_dir;
  if (cli.registry) cfg.registry = *cli.registry;
}

void validate(const RunConfig& cfg) {
  if (cfg.format != "text" && cfg.format != "json") throw ConfigError("--format must be text or json");
  if (cfg.n_plans < 0) throw ConfigError("--n must be non-negative");
  if (cfg.m_licenses < 0) throw ConfigError("--m must be non-negative");
  if (cfg.c_migration < 0 || cfg.c_removal < 0) throw ConfigError("costs must be non-negative");
  if (cfg.timeout_secs <= 0) throw ConfigError("--timeout must be positive");
}

ReportFormat format_of(const RunConfig& cfg) {
  return cfg.format == "json" ? ReportFormat::kJson : ReportFormat::kText;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Session {
  RunConfig cfg;
  std::ostream& out;
  std::ostream& err;

  std::optional<PackageIndex> index;
  CompatibilityMatrix matrix;

  MarkerEnv env() const {
    MarkerEnv e;
    for (const auto& x : cfg.extras) e.extras.insert(PackageName::normalize(x));
    return e;
  }

  void load() {
    if (cfg.index_path.empty()) throw ConfigError("no index given (use --index, LICREMEDY_INDEX or a config file)");
    matrix = cfg.matrix_path.empty() ? CompatibilityMatrix::builtin() : CompatibilityMatrix::load(cfg.matrix_path);
    auto tables = NormalizationTables::builtin();
    if (!cfg.keywords_path.empty()) tables.keyword_rules = load_keyword_rules(cfg.keywords_path);
    LoadOptions options;
    options.annotate = make_license_annotator(std::move(tables), {}, [&](const std::string& w) {
      err << "warning: " << w << '\n';
    });
    auto loaded = load_index(cfg.index_path, options);
    for (const auto& d : loaded.diagnostics) err << cfg.index_path << ":" << d.line << ": " << d.message << '\n';
    index = std::move(loaded.index);
  }

  Timestamp snapshot_now() const {
    Timestamp latest{0};
    for (const auto& [name, list] : index->packages()) {
      for (const auto& rec : list) latest = std::max(latest, rec.upload_time);
    }
    return latest;
  }

  Timestamp timestamp_for(const ReleaseId& root) const {
    if (cfg.at == "now") return snapshot_now();
    if (cfg.at == "upload") {
      const auto* rec = index->find(root);
      if (!rec) throw UnknownRoot("release " + root.to_string() + " is not in the index");
      return rec->upload_time;
    }
    try {
      return Timestamp::parse(cfg.at);
    } catch (const MalformedTimestamp& e) {
      throw ConfigError(std::string("--at: ") + e.what());
    }
  }

  ReleaseId release(const std::string& name, const std::string& version) const {
    try {
      return {PackageName(name), Version::parse(version)};
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }

  ReportContext context(std::vector<std::string> warnings) const {
    return {std::move(warnings), index->snapshot_hash(), matrix.version()};
  }

  RemediationOptions remediation_options() const {
    RemediationOptions o;
    o.n_plans = cfg.n_plans;
    o.m_licenses = cfg.m_licenses;
    o.cost = {cfg.c_migration, cfg.c_removal};
    o.solve.timeout = std::chrono::seconds(cfg.timeout_secs);
    o.max_packages = cfg.max_packages;
    o.env = env();
    return o;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"License incompatibility detection and remediation for package dependency graphs", "licremedy"};
  app.require_subcommand(1);
  app.fallthrough();

  CliValues cli;
  app.add_option("--config", cli.config_path, "JSON config file (keys mirror the long flags)");
  app.add_option("--index", cli.index_path, "JSON-lines package index");
  app.add_option("--matrix", cli.matrix_path, "Compatibility matrix JSON (default: built-in 16-license matrix)");
  app.add_option("--keywords", cli.keywords_path, "Keyword table JSON (default: built-in)");
  app.add_option("--migrations", cli.migrations_path, "Migration rules, JSON lines of {source, target}");
  app.add_option("--at", cli.at, "Resolution time: ISO-8601, 'now' (latest upload in the index) or 'upload'");
  app.add_option("--extra", cli.extras, "Activate an extra of the root release (repeatable)");
  app.add_option("--n", cli.n_plans, "Number of dependency plans (default 5)");
  app.add_option("--m", cli.m_licenses, "Number of alternative licenses (default 3)");
  app.add_option("--c-migration", cli.c_migration, "Cost of a migration (default 10)");
  app.add_option("--c-removal", cli.c_removal, "Cost of a removal (default 100)");
  app.add_option("--timeout", cli.timeout_secs, "Solver budget per plan in seconds (default 300)");
  app.add_option("--format", cli.format, "Output format: text or json");
  app.add_option("--threads", cli.threads, "Worker threads for stats (default: all cores)");
  app.add_option("--max-packages", cli.max_packages, "Cap on the remediation universe (default 2000)");

  std::string name, version, graph_path, output_path;
  bool all_releases = false;

  auto* resolve_cmd = app.add_subcommand("resolve", "Resolve the dependency graph of a release");
  resolve_cmd->add_option("name", name, "Package name")->required();
  resolve_cmd->add_option("version", version, "Package version")->required();
  resolve_cmd->add_option("-o,--output", output_path, "Write the graph JSON to a file");

  auto* analyze_cmd = app.add_subcommand("analyze", "Label a release and list incompatible dependencies");
  analyze_cmd->add_option("name", name, "Package name");
  analyze_cmd->add_option("version", version, "Package version");
  analyze_cmd->add_option("--graph", graph_path, "Analyze a graph written by 'resolve' instead of resolving");

  auto* remediate_cmd = app.add_subcommand("remediate", "Recommend remediations for an incompatible release");
  remediate_cmd->add_option("name", name, "Package name");
  remediate_cmd->add_option("version", version, "Package version");
  remediate_cmd->add_option("--graph", graph_path, "Start from a graph written by 'resolve'");

  auto* stats_cmd = app.add_subcommand("stats", "Ecosystem license and incompatibility statistics");
  stats_cmd->add_flag("--all-releases", all_releases, "Analyze every release, not the latest per package and year");

  auto* fetch_cmd = app.add_subcommand("fetch", "Fetch one release from the registry as an index line");
  fetch_cmd->add_option("name", name, "Package name")->required();
  fetch_cmd->add_option("version", version, "Package version")->required();
  fetch_cmd->add_option("--cache-dir", cli.cache_dir, "Response cache directory");
  fetch_cmd->add_option("--registry", cli.registry, "Registry base URL");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    RunConfig cfg;
    const auto config_path = cli.config_path ? cli.config_path : env("LICREMEDY_CONFIG");
    if (config_path) apply_file(cfg, *config_path);
    apply_env(cfg, env);
    apply_cli(cfg, cli);
    validate(cfg);
    Session s{cfg, out, err, std::nullopt, {}};

    if (fetch_cmd->parsed()) {
      RegistryClient::Options options;
      options.base_url = cfg.registry;
      options.cache_dir = cfg.cache_dir;
      RegistryClient client(options);
      const PackageName pkg(name);
      const auto rec = client.fetch_release(pkg, version);
      json line{{"name", rec.id.name.str()}, {"version", rec.id.version.raw()},
                {"upload_time", rec.upload_time.to_iso()}};
      line["requires_dist"] = json::array();
      for (const auto& r : rec.requires_dist) line["requires_dist"].push_back(r.to_string());
      line["license"] = rec.license_field ? json(*rec.license_field) : json(nullptr);
      line["classifiers"] = rec.classifiers;
      out << line.dump() << '\n';
      return kOk;
    }

    s.load();
    const auto fmt = format_of(cfg);

    if (resolve_cmd->parsed()) {
      const auto root = s.release(name, version);
      const auto g = resolve(*s.index, root, s.timestamp_for(root), s.env());
      const auto text = graph_to_json(g) + "\n";
      if (output_path.empty()) {
        out << text;
      } else {
        std::ofstream file(output_path, std::ios::binary | std::ios::trunc);
        file << text;
        if (!file) throw IoFailure("cannot write " + output_path);
      }
      return kOk;
    }

    auto baseline = [&]() -> DependencyGraph {
      if (!graph_path.empty()) return graph_from_json(read_file(graph_path));
      if (name.empty() || version.empty()) throw ConfigError("give a package name and version, or --graph");
      const auto root = s.release(name, version);
      return resolve(*s.index, root, s.timestamp_for(root), s.env());
    };

    if (analyze_cmd->parsed()) {
      const auto g = baseline();
      const auto d = graph_path.empty() ? detect(g, s.matrix) : detect(g, *s.index, s.matrix);
      out << (fmt == ReportFormat::kJson ? detection_to_json(g, d) + "\n" : detection_to_text(g, d));
      return kOk;
    }

    if (remediate_cmd->parsed()) {
      std::vector<MigrationRule> migrations;
      if (!cfg.migrations_path.empty()) migrations = load_migration_rules(cfg.migrations_path);
      auto g = baseline();
      if (!s.index->find(g.root)) throw UnknownRoot("release " + g.root.to_string() + " is not in the index");
      const auto outcome = remediate_graph(*s.index, std::move(g), s.matrix, migrations, s.remediation_options());
      if (!outcome.needed) {
        out << render_not_needed(outcome.baseline.root, outcome.detection.label, fmt, s.context({}));
        return kOk;
      }
      out << render_report(outcome.baseline.root, outcome.licenses, outcome.plans, fmt,
                           s.context(outcome.warnings));
      return outcome.plans.empty() ? kNoSolution : kOk;
    }

    if (stats_cmd->parsed()) {
      StatsOptions options;
      options.latest_per_year = !all_releases;
      options.threads = cfg.threads;
      options.env = s.env();
      const auto report = ecosystem_stats(*s.index, s.matrix, options);
      out << (fmt == ReportFormat::kJson ? report.to_json() + "\n" : report.to_text());
      return kOk;
    }
  } catch (const UnknownRoot& e) {
    err << "error: " << e.what() << '\n';
    return kNotFound;
  } catch (const NotFound& e) {
    err << "error: " << e.what() << '\n';
    return kNotFound;
  } catch (const NodeNotInGraph& e) {
    err << "error: " << e.what() << '\n';
    return kNotFound;
  } catch (const NoSolution& e) {
    err << "error: " << e.what() << '\n';
    return kNoSolution;
  } catch (const SolverTimeout& e) {
    err << "error: " << e.what() << '\n';
    return kTimeout;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace licremedy::cli
