#include "licremedy/model.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>

#include "licremedy/error.hpp"

namespace licremedy {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

}  // namespace

// ---------------------------------------------------------------------------
// PackageName

PackageName::PackageName(std::string_view raw) : value_(normalize(raw)) {
  if (value_.empty()) throw MalformedRequirement("empty package name");
}

std::string PackageName::normalize(std::string_view raw) {
  raw = trim(raw);
  std::string out;
  out.reserve(raw.size());
  bool in_sep = false;
  for (const char c : raw) {
    if (c == '-' || c == '_' || c == '.') {
      if (!in_sep) out.push_back('-');
      in_sep = true;
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      in_sep = false;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Timestamp

Timestamp Timestamp::parse(std::string_view iso) {
  const std::string text(trim(iso));
  auto fail = [&]() -> Timestamp { throw MalformedTimestamp("malformed timestamp: '" + text + "'"); };

  std::size_t pos = 0;
  auto digits = [&](std::size_t n) -> int {
    if (pos + n > text.size()) fail();
    int value = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const char c = text[pos + i];
      if (!std::isdigit(static_cast<unsigned char>(c))) fail();
      value = value * 10 + (c - '0');
    }
    pos += n;
    return value;
  };
  auto expect = [&](char c) {
    if (pos >= text.size() || text[pos] != c) fail();
    ++pos;
  };

  const int year = digits(4);
  expect('-');
  const int month = digits(2);
  expect('-');
  const int day = digits(2);
  if (month < 1 || month > 12 || day < 1 || day > 31) fail();

  int hour = 0, minute = 0, second = 0;
  std::int64_t millis = 0;
  std::int64_t offset_minutes = 0;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ') fail();
    ++pos;
    hour = digits(2);
    expect(':');
    minute = digits(2);
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      second = digits(2);
      if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
        ++pos;
        int scale = 100;
        std::size_t count = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
          millis += (text[pos] - '0') * scale;
          scale /= 10;
          ++pos;
          ++count;
        }
        if (count == 0) fail();
      }
    }
    if (hour > 23 || minute > 59 || second > 60) fail();
    if (pos < text.size()) {
      const char c = text[pos];
      if (c == 'Z' || c == 'z') {
        ++pos;
      } else if (c == '+' || c == '-') {
        ++pos;
        const int oh = digits(2);
        if (pos < text.size() && text[pos] == ':') ++pos;
        const int om = digits(2);
        offset_minutes = (oh * 60 + om) * (c == '-' ? -1 : 1);
      } else {
        fail();
      }
    }
  }
  if (pos != text.size()) fail();

  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  const std::int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second - offset_minutes * 60;
  return Timestamp{secs * 1000 + millis};
}

Timestamp Timestamp::now() {
  using namespace std::chrono;
  return {duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count()};
}

std::string Timestamp::to_iso() const {
  std::int64_t secs = millis / 1000;
  std::int64_t ms = millis % 1000;
  if (ms < 0) {
    ms += 1000;
    secs -= 1;
  }
  std::int64_t days = secs / 86400;
  std::int64_t rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[48];
  if (ms != 0) {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                  static_cast<long long>(y), m, d, static_cast<long long>(rem / 3600),
                  static_cast<long long>(rem / 60 % 60), static_cast<long long>(rem % 60),
                  static_cast<long long>(ms));
  } else {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(y), m,
                  d, static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
  }
  return buf;
}

int Timestamp::year() const {
  std::int64_t days = millis / 86400000;
  if (millis % 86400000 < 0) days -= 1;
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  return static_cast<int>(y);
}

// ---------------------------------------------------------------------------
// Specifier

std::string_view to_string(SpecOp op) {
  switch (op) {
    case SpecOp::kEqual: return "==";
    case SpecOp::kNotEqual: return "!=";
    case SpecOp::kLessEqual: return "<=";
    case SpecOp::kGreaterEqual: return ">=";
    case SpecOp::kLess: return "<";
    case SpecOp::kGreater: return ">";
    case SpecOp::kCompatible: return "~=";
    case SpecOp::kArbitrary: return "===";
  }
  return "?";
}

Specifier::Specifier(SpecOp op, Version version)
    : op_(op), version_(std::move(version)), text_(version_.raw()) {}

Specifier Specifier::parse(std::string_view text) {
  const std::string_view t = trim(text);
  static constexpr std::pair<std::string_view, SpecOp> kOps[] = {
      {"===", SpecOp::kArbitrary}, {"~=", SpecOp::kCompatible}, {"==", SpecOp::kEqual},
      {"!=", SpecOp::kNotEqual},   {"<=", SpecOp::kLessEqual},  {">=", SpecOp::kGreaterEqual},
      {"<", SpecOp::kLess},        {">", SpecOp::kGreater},
  };
  Specifier spec;
  bool found = false;
  std::string_view rest;
  for (const auto& [spelling, op] : kOps) {
    if (t.substr(0, spelling.size()) == spelling) {
      spec.op_ = op;
      rest = trim(t.substr(spelling.size()));
      found = true;
      break;
    }
  }
  if (!found) throw MalformedRequirement("specifier lacks an operator: '" + std::string(t) + "'");
  if (rest.empty()) throw MalformedRequirement("specifier lacks a version: '" + std::string(t) + "'");
  spec.text_ = std::string(rest);

  if (spec.op_ == SpecOp::kArbitrary) {
    if (rest.find_first_of(" \t,;") != std::string_view::npos) {
      throw MalformedRequirement("invalid arbitrary-equality operand: '" + std::string(rest) + "'");
    }
    spec.version_ = Version::try_parse(rest).value_or(Version{});
    return spec;
  }

  std::string_view vtext = rest;
  if (vtext.size() >= 2 && vtext.substr(vtext.size() - 2) == ".*") {
    if (spec.op_ != SpecOp::kEqual && spec.op_ != SpecOp::kNotEqual) {
      throw MalformedRequirement("wildcard only allowed with == and !=: '" + std::string(t) + "'");
    }
    spec.wildcard_ = true;
    vtext.remove_suffix(2);
  }
  try {
    spec.version_ = Version::parse(vtext);
  } catch (const MalformedVersion& e) {
    throw MalformedRequirement(std::string("bad version in specifier: ") + e.what());
  }
  const Version& v = spec.version_;
  if (spec.wildcard_ && (v.pre() || v.post() || v.dev() || v.has_local())) {
    throw MalformedRequirement("wildcard prefix must be a plain release: '" + std::string(t) + "'");
  }
  if (spec.op_ == SpecOp::kCompatible && (v.release().size() < 2 || v.has_local())) {
    throw MalformedRequirement("~= needs at least two release components: '" + std::string(t) + "'");
  }
  if (v.has_local() && spec.op_ != SpecOp::kEqual && spec.op_ != SpecOp::kNotEqual) {
    throw MalformedRequirement("local versions only allowed with == and !=: '" + std::string(t) + "'");
  }
  return spec;
}

bool Specifier::names_prerelease() const {
  switch (op_) {
    case SpecOp::kEqual:
    case SpecOp::kGreaterEqual:
    case SpecOp::kLessEqual:
    case SpecOp::kCompatible:
    case SpecOp::kArbitrary:
    case SpecOp::kLess:
    case SpecOp::kGreater:
      return !wildcard_ && version_.is_prerelease();
    default:
      return false;
  }
}

bool Specifier::prefix_match(const Version& v) const {
  // `~=` drops the last release component of its operand.
  const auto& prefix = version_.release();
  const std::size_t n = op_ == SpecOp::kCompatible ? prefix.size() - 1 : prefix.size();
  if (v.epoch() != version_.epoch()) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t have = i < v.release().size() ? v.release()[i] : 0;
    if (have != prefix[i]) return false;
  }
  return true;
}

bool Specifier::contains(const Version& v) const {
  switch (op_) {
    case SpecOp::kCompatible:
      return v.public_version() >= version_ && prefix_match(v);
    case SpecOp::kEqual:
      if (wildcard_) return prefix_match(v);
      return version_.has_local() ? v == version_ : v.public_version() == version_;
    case SpecOp::kNotEqual:
      if (wildcard_) return !prefix_match(v);
      return version_.has_local() ? v != version_ : v.public_version() != version_;
    case SpecOp::kLessEqual:
      return v.public_version() <= version_;
    case SpecOp::kGreaterEqual:
      return v.public_version() >= version_;
    case SpecOp::kLess:
      if (!(v < version_)) return false;
      // `<1.0` must not admit 1.0rc1.
      if (!version_.is_prerelease() && v.is_prerelease() && v.base_version() == version_.base_version()) {
        return false;
      }
      return true;
    case SpecOp::kGreater:
      if (!(v > version_)) return false;
      // `>1.0` must not admit 1.0.post1 or 1.0+local.
      if (!version_.is_postrelease() && v.is_postrelease() &&
          v.base_version() == version_.base_version()) {
        return false;
      }
      if (v.has_local() && v.base_version() == version_.base_version()) return false;
      return true;
    case SpecOp::kArbitrary:
      return lower(trim(v.raw())) == lower(text_);
  }
  return false;
}

std::string Specifier::to_string() const {
  return std::string(licremedy::to_string(op_)) + text_;
}

bool Specifier::operator==(const Specifier& other) const {
  if (op_ != other.op_ || wildcard_ != other.wildcard_) return false;
  if (op_ == SpecOp::kArbitrary) return lower(text_) == lower(other.text_);
  return version_ == other.version_;
}

SpecifierSet parse_specifiers(std::string_view text) {
  SpecifierSet out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view piece =
        text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(Specifier::parse(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string to_string(const SpecifierSet& specs) {
  std::string out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (i) out += ',';
    out += specs[i].to_string();
  }
  return out;
}

bool constraint_matches(const Version& v, const SpecifierSet& specs, bool allow_prerelease) {
  if (v.is_prerelease() && !allow_prerelease) {
    const bool opted_in =
        std::any_of(specs.begin(), specs.end(), [](const Specifier& s) { return s.names_prerelease(); });
    if (!opted_in) return false;
  }
  return std::all_of(specs.begin(), specs.end(), [&](const Specifier& s) { return s.contains(v); });
}

// ---------------------------------------------------------------------------
// Marker

struct Marker::Node {
  enum class Kind { kAnd, kOr, kCompare };
  struct Operand {
    bool is_variable = false;
    std::string value;
    bool operator==(const Operand&) const = default;
  };

  Kind kind = Kind::kCompare;
  std::vector<std::shared_ptr<const Node>> children;
  Operand lhs;
  std::string op;
  Operand rhs;
};

namespace {

using MarkerNode = std::shared_ptr<const Marker::Node>;

constexpr std::string_view kMarkerVariables[] = {
    "extra",
    "python_version",
    "python_full_version",
    "sys_platform",
    "os_name",
    "platform_system",
    "platform_machine",
    "platform_release",
    "platform_version",
    "platform_python_implementation",
    "implementation_name",
    "implementation_version",
};

class MarkerParser {
 public:
  explicit MarkerParser(std::string_view text) : text_(text) {}

  MarkerNode parse() {
    auto node = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected text");
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw MalformedRequirement("bad marker (" + why + "): '" + std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  bool keyword(std::string_view word) {
    skip_ws();
    if (text_.substr(pos_, word.size()) != word) return false;
    const std::size_t end = pos_ + word.size();
    if (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
      return false;
    }
    pos_ = end;
    return true;
  }

  static MarkerNode combine(Marker::Node::Kind kind, std::vector<MarkerNode> items) {
    if (items.size() == 1) return items.front();
    auto node = std::make_shared<Marker::Node>();
    node->kind = kind;
    for (auto& item : items) {
      if (item->kind == kind) {
        node->children.insert(node->children.end(), item->children.begin(), item->children.end());
      } else {
        node->children.push_back(std::move(item));
      }
    }
    return node;
  }

  MarkerNode parse_or() {
    std::vector<MarkerNode> items{parse_and()};
    while (keyword("or")) items.push_back(parse_and());
    return combine(Marker::Node::Kind::kOr, std::move(items));
  }

  MarkerNode parse_and() {
    std::vector<MarkerNode> items{parse_atom()};
    while (keyword("and")) items.push_back(parse_atom());
    return combine(Marker::Node::Kind::kAnd, std::move(items));
  }

  MarkerNode parse_atom() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      auto inner = parse_or();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("missing ')'");
      ++pos_;
      return inner;
    }
    auto node = std::make_shared<Marker::Node>();
    node->lhs = operand();
    node->op = comparison();
    node->rhs = operand();
    if (node->lhs.is_variable == node->rhs.is_variable && node->lhs.is_variable) {
      fail("comparison between two variables");
    }
    return node;
  }

  Marker::Node::Operand operand() {
    skip_ws();
    if (pos_ >= text_.size()) fail("missing operand");
    const char c = text_[pos_];
    if (c == '\'' || c == '"') {
      const std::size_t close = text_.find(c, pos_ + 1);
      if (close == std::string_view::npos) fail("unterminated string");
      Marker::Node::Operand op{false, std::string(text_.substr(pos_ + 1, close - pos_ - 1))};
      pos_ = close + 1;
      return op;
    }
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_' ||
                                  text_[end] == '.')) {
      ++end;
    }
    const std::string name(text_.substr(pos_, end - pos_));
    if (std::find(std::begin(kMarkerVariables), std::end(kMarkerVariables), name) == std::end(kMarkerVariables)) {
      fail("unknown variable '" + name + "'");
    }
    pos_ = end;
    return {true, name};
  }

  std::string comparison() {
    skip_ws();
    static constexpr std::string_view kOps[] = {"===", "==", "!=", "<=", ">=", "~=", "<", ">"};
    for (const auto op : kOps) {
      if (text_.substr(pos_, op.size()) == op) {
        pos_ += op.size();
        return std::string(op);
      }
    }
    if (keyword("in")) return "in";
    if (keyword("not")) {
      if (!keyword("in")) fail("expected 'in' after 'not'");
      return "not in";
    }
    fail("missing comparison operator");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string render_operand(const Marker::Node::Operand& o) {
  if (o.is_variable) return o.value;
  const char quote = o.value.find('"') == std::string::npos ? '"' : '\'';
  return std::string(1, quote) + o.value + quote;
}

std::string render(const Marker::Node& node, bool parenthesize_or) {
  using Kind = Marker::Node::Kind;
  if (node.kind == Kind::kCompare) {
    return render_operand(node.lhs) + " " + node.op + " " + render_operand(node.rhs);
  }
  const bool is_and = node.kind == Kind::kAnd;
  std::string out;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (i) out += is_and ? " and " : " or ";
    out += render(*node.children[i], is_and);
  }
  if (!is_and && parenthesize_or) return "(" + out + ")";
  return out;
}

bool nodes_equal(const Marker::Node& a, const Marker::Node& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Marker::Node::Kind::kCompare) return a.lhs == b.lhs && a.op == b.op && a.rhs == b.rhs;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!nodes_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

bool compare_values(const std::string& lhs, const std::string& op, const std::string& rhs) {
  if (op == "in") return rhs.find(lhs) != std::string::npos;
  if (op == "not in") return rhs.find(lhs) == std::string::npos;
  if (op == "===") return lhs == rhs;
  const auto lv = Version::try_parse(lhs);
  if (lv && op != "===") {
    try {
      return Specifier::parse(op + rhs).contains(*lv);
    } catch (const Error&) {
      // Fall through to plain string comparison.
    }
  }
  if (op == "==") return lhs == rhs;
  if (op == "!=") return lhs != rhs;
  return false;
}

bool evaluate_node(const Marker::Node& node, const MarkerEnv& env) {
  using Kind = Marker::Node::Kind;
  switch (node.kind) {
    case Kind::kAnd:
      return std::all_of(node.children.begin(), node.children.end(),
                         [&](const MarkerNode& c) { return evaluate_node(*c, env); });
    case Kind::kOr:
      return std::any_of(node.children.begin(), node.children.end(),
                         [&](const MarkerNode& c) { return evaluate_node(*c, env); });
    case Kind::kCompare:
      break;
  }
  const bool lhs_extra = node.lhs.is_variable && node.lhs.value == "extra";
  const bool rhs_extra = node.rhs.is_variable && node.rhs.value == "extra";
  if (lhs_extra || rhs_extra) {
    const std::string name = PackageName::normalize(lhs_extra ? node.rhs.value : node.lhs.value);
    const bool active = env.extras.count(name) > 0;
    if (node.op == "==" || node.op == "===") return active;
    if (node.op == "!=") return !active;
    return false;
  }
  auto value_of = [&](const Marker::Node::Operand& o) -> std::string {
    if (!o.is_variable) return o.value;
    const auto it = env.vars.find(o.value);
    return it == env.vars.end() ? std::string{} : it->second;
  };
  return compare_values(value_of(node.lhs), node.op, value_of(node.rhs));
}

void collect_extras(const Marker::Node& node, std::set<std::string>& out, bool& any) {
  if (node.kind != Marker::Node::Kind::kCompare) {
    for (const auto& c : node.children) collect_extras(*c, out, any);
    return;
  }
  const bool lhs_extra = node.lhs.is_variable && node.lhs.value == "extra";
  const bool rhs_extra = node.rhs.is_variable && node.rhs.value == "extra";
  if (!lhs_extra && !rhs_extra) return;
  any = true;
  if (node.op == "==" || node.op == "===") {
    out.insert(PackageName::normalize(lhs_extra ? node.rhs.value : node.lhs.value));
  }
}

}  // namespace

Marker Marker::parse(std::string_view text) {
  Marker m;
  m.root_ = MarkerParser(trim(text)).parse();
  return m;
}

bool Marker::evaluate(const MarkerEnv& env) const { return evaluate_node(*root_, env); }

bool Marker::references_extra() const {
  std::set<std::string> names;
  bool any = false;
  collect_extras(*root_, names, any);
  return any;
}

std::set<std::string> Marker::referenced_extras() const {
  std::set<std::string> names;
  bool any = false;
  collect_extras(*root_, names, any);
  return names;
}

std::string Marker::to_string() const { return render(*root_, false); }

bool Marker::operator==(const Marker& other) const { return nodes_equal(*root_, *other.root_); }

Marker Marker::either(const Marker& a, const Marker& b) {
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::kOr;
  for (const auto* m : {&a, &b}) {
    if (m->root_->kind == Node::Kind::kOr) {
      node->children.insert(node->children.end(), m->root_->children.begin(), m->root_->children.end());
    } else {
      node->children.push_back(m->root_);
    }
  }
  Marker out;
  out.root_ = std::move(node);
  return out;
}

// ---------------------------------------------------------------------------
// Requirement

Requirement Requirement::parse(std::string_view raw) {
  const std::string_view text = trim(raw);
  if (text.empty()) throw MalformedRequirement("empty requirement");

  std::string_view head = text;
  std::optional<Marker> marker;
  if (const auto semi = text.find(';'); semi != std::string_view::npos) {
    head = trim(text.substr(0, semi));
    marker = Marker::parse(text.substr(semi + 1));
  }

  auto bad = [&](const std::string& why) {
    return MalformedRequirement(why + ": '" + std::string(text) + "'");
  };

  std::size_t pos = 0;
  auto is_name_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  };
  while (pos < head.size() && is_name_char(head[pos])) ++pos;
  const std::string_view name = head.substr(0, pos);
  if (name.empty() || !std::isalnum(static_cast<unsigned char>(name.front())) ||
      !std::isalnum(static_cast<unsigned char>(name.back()))) {
    throw bad("invalid package name");
  }

  Requirement req;
  req.name = PackageName(name);
  req.marker = std::move(marker);

  std::string_view rest = trim(head.substr(pos));
  if (!rest.empty() && rest.front() == '[') {
    const auto close = rest.find(']');
    if (close == std::string_view::npos) throw bad("unterminated extras");
    std::string_view list = rest.substr(1, close - 1);
    while (!list.empty()) {
      const auto comma = list.find(',');
      const std::string_view item = trim(list.substr(0, comma));
      if (item.empty() || !std::all_of(item.begin(), item.end(), is_name_char)) throw bad("invalid extra");
      req.extras.insert(PackageName::normalize(item));
      if (comma == std::string_view::npos) break;
      list.remove_prefix(comma + 1);
    }
    rest = trim(rest.substr(close + 1));
  }
  if (!rest.empty() && rest.front() == '@') throw bad("direct URL references are not supported");
  if (!rest.empty() && rest.front() == '(') {
    if (rest.back() != ')') throw bad("unbalanced parentheses");
    rest = trim(rest.substr(1, rest.size() - 2));
  }
  req.specifiers = parse_specifiers(rest);
  return req;
}

std::string Requirement::to_string() const {
  std::string out = name.str();
  if (!extras.empty()) {
    out += '[';
    bool first = true;
    for (const auto& e : extras) {
      if (!first) out += ',';
      out += e;
      first = false;
    }
    out += ']';
  }
  out += licremedy::to_string(specifiers);
  if (marker) out += "; " + marker->to_string();
  return out;
}

}  // namespace licremedy
