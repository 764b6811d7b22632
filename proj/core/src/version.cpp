#include "licremedy/version.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "licremedy/error.hpp"

namespace licremedy {
namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  std::size_t pos() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }
  void advance(std::size_t n = 1) { pos_ += n; }

  bool starts_with(std::string_view word) const {
    return text_.substr(pos_, word.size()) == word;
  }
  bool digit_at(std::size_t ahead = 0) const {
    return std::isdigit(static_cast<unsigned char>(peek(ahead))) != 0;
  }
  static bool is_sep(char c) { return c == '-' || c == '_' || c == '.'; }

  // Returns nullopt when no digit is present. Overflow is a parse error.
  std::optional<std::uint64_t> number() {
    if (!digit_at()) return std::nullopt;
    std::uint64_t value = 0;
    while (digit_at()) {
      const auto d = static_cast<std::uint64_t>(peek() - '0');
      if (value > (std::numeric_limits<std::uint64_t>::max() - d) / 10) {
        throw MalformedVersion("version component overflows: " + std::string(text_));
      }
      value = value * 10 + d;
      advance();
    }
    return value;
  }

  // Consumes [sep]? number if a number follows, returning it.
  std::optional<std::uint64_t> optional_separated_number() {
    if (is_sep(peek()) && digit_at(1)) {
      advance();
      return number();
    }
    return number();
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string lowercase_trimmed(std::string_view raw) {
  const auto first = raw.find_first_not_of(" \t\r\n\v\f");
  if (first == std::string_view::npos) return {};
  const auto last = raw.find_last_not_of(" \t\r\n\v\f");
  std::string out(raw.substr(first, last - first + 1));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct Label {
  std::string_view spelling;
  Version::PreTag tag;
};

// Longer spellings first so "alpha" wins over "a" and "preview" over "pre".
constexpr Label kPreLabels[] = {
    {"alpha", Version::PreTag::kAlpha}, {"a", Version::PreTag::kAlpha},
    {"beta", Version::PreTag::kBeta},   {"b", Version::PreTag::kBeta},
    {"preview", Version::PreTag::kRc},  {"pre", Version::PreTag::kRc},
    {"rc", Version::PreTag::kRc},       {"c", Version::PreTag::kRc},
};

constexpr std::string_view kPostLabels[] = {"post", "rev", "r"};

int compare_local(const std::vector<Version::LocalPart>& a,
                  const std::vector<Version::LocalPart>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const bool a_num = std::holds_alternative<std::uint64_t>(a[i]);
    const bool b_num = std::holds_alternative<std::uint64_t>(b[i]);
    if (a_num != b_num) return a_num ? 1 : -1;
    if (a_num) {
      const auto x = std::get<std::uint64_t>(a[i]);
      const auto y = std::get<std::uint64_t>(b[i]);
      if (x != y) return x < y ? -1 : 1;
    } else {
      const int c = std::get<std::string>(a[i]).compare(std::get<std::string>(b[i]));
      if (c != 0) return c < 0 ? -1 : 1;
    }
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

template <typename T>
int cmp(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

}  // namespace

Version Version::parse(std::string_view raw) {
  const std::string text = lowercase_trimmed(raw);
  if (text.empty()) throw MalformedVersion("empty version string");

  Version v;
  v.raw_ = std::string(raw);
  Cursor cur(text);
  if (cur.peek() == 'v') cur.advance();

  auto first = cur.number();
  if (!first) throw MalformedVersion("version must start with a number: " + std::string(raw));
  if (cur.peek() == '!') {
    cur.advance();
    v.epoch_ = *first;
    first = cur.number();
    if (!first) throw MalformedVersion("missing release after epoch: " + std::string(raw));
  }
  v.release_.push_back(*first);
  while (cur.peek() == '.' && cur.digit_at(1)) {
    cur.advance();
    v.release_.push_back(*cur.number());
  }

  // Pre-release segment.
  {
    const std::size_t mark = cur.pos();
    if (Cursor::is_sep(cur.peek())) cur.advance();
    bool matched = false;
    for (const auto& label : kPreLabels) {
      if (cur.starts_with(label.spelling)) {
        cur.advance(label.spelling.size());
        v.pre_ = PreRelease{label.tag, cur.optional_separated_number().value_or(0)};
        matched = true;
        break;
      }
    }
    if (!matched) cur.reset(mark);
  }

  // Post-release segment: "-N" or [sep]?(post|rev|r)[sep]?N?
  {
    const std::size_t mark = cur.pos();
    if (cur.peek() == '-' && cur.digit_at(1)) {
      cur.advance();
      v.post_ = cur.number();
    } else {
      if (Cursor::is_sep(cur.peek())) cur.advance();
      bool matched = false;
      for (const auto label : kPostLabels) {
        if (cur.starts_with(label)) {
          cur.advance(label.size());
          v.post_ = cur.optional_separated_number().value_or(0);
          matched = true;
          break;
        }
      }
      if (!matched) cur.reset(mark);
    }
  }

  // Development segment.
  {
    const std::size_t mark = cur.pos();
    if (Cursor::is_sep(cur.peek())) cur.advance();
    if (cur.starts_with("dev")) {
      cur.advance(3);
      v.dev_ = cur.optional_separated_number().value_or(0);
    } else {
      cur.reset(mark);
    }
  }

  // Local segment.
  if (cur.peek() == '+') {
    cur.advance();
    std::string part;
    auto flush = [&] {
      if (part.empty()) throw MalformedVersion("empty local segment: " + std::string(raw));
      const bool numeric = std::all_of(part.begin(), part.end(),
                                       [](unsigned char c) { return std::isdigit(c) != 0; });
      if (numeric && part.size() <= 18) {
        v.local_.emplace_back(static_cast<std::uint64_t>(std::stoull(part)));
      } else {
        v.local_.emplace_back(part);
      }
      part.clear();
    };
    while (!cur.done()) {
      const char c = cur.peek();
      if (std::isalnum(static_cast<unsigned char>(c))) {
        part.push_back(c);
      } else if (Cursor::is_sep(c)) {
        flush();
      } else {
        throw MalformedVersion("invalid character in local segment: " + std::string(raw));
      }
      cur.advance();
    }
    flush();
  }

  if (!cur.done()) throw MalformedVersion("unexpected trailing text in version: " + std::string(raw));
  return v;
}

std::optional<Version> Version::try_parse(std::string_view raw) noexcept {
  try {
    return parse(raw);
  } catch (...) {
    return std::nullopt;
  }
}

Version Version::public_version() const {
  Version v = *this;
  v.local_.clear();
  v.raw_ = v.to_string();
  return v;
}

Version Version::base_version() const {
  Version v;
  v.epoch_ = epoch_;
  v.release_ = release_;
  v.raw_ = v.to_string();
  return v;
}

std::string Version::to_string() const {
  std::string out;
  if (epoch_ != 0) out += std::to_string(epoch_) + "!";
  for (std::size_t i = 0; i < release_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(release_[i]);
  }
  if (pre_) {
    static constexpr const char* kTags[] = {"a", "b", "rc"};
    out += kTags[static_cast<int>(pre_->tag)];
    out += std::to_string(pre_->number);
  }
  if (post_) out += ".post" + std::to_string(*post_);
  if (dev_) out += ".dev" + std::to_string(*dev_);
  if (!local_.empty()) {
    out += '+';
    for (std::size_t i = 0; i < local_.size(); ++i) {
      if (i) out += '.';
      if (const auto* n = std::get_if<std::uint64_t>(&local_[i])) {
        out += std::to_string(*n);
      } else {
        out += std::get<std::string>(local_[i]);
      }
    }
  }
  return out;
}

int Version::compare(const Version& a, const Version& b) {
  if (int c = cmp(a.epoch_, b.epoch_)) return c;

  // Release tuples compare with trailing zeros stripped, i.e. zero padded.
  const std::size_t n = std::max(a.release_.size(), b.release_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t x = i < a.release_.size() ? a.release_[i] : 0;
    const std::uint64_t y = i < b.release_.size() ? b.release_[i] : 0;
    if (int c = cmp(x, y)) return c;
  }

  // Pre segment: a bare dev release sorts before any pre-release of the same
  // base; a final release sorts after all of them.
  auto pre_rank = [](const Version& v) -> int {
    if (!v.pre_ && !v.post_ && v.dev_) return -1;
    if (!v.pre_) return 1;
    return 0;
  };
  const int ra = pre_rank(a);
  const int rb = pre_rank(b);
  if (int c = cmp(ra, rb)) return c;
  if (ra == 0) {
    if (int c = cmp(static_cast<int>(a.pre_->tag), static_cast<int>(b.pre_->tag))) return c;
    if (int c = cmp(a.pre_->number, b.pre_->number)) return c;
  }

  // Post: absent sorts first.
  if (a.post_.has_value() != b.post_.has_value()) return a.post_ ? 1 : -1;
  if (a.post_) {
    if (int c = cmp(*a.post_, *b.post_)) return c;
  }

  // Dev: absent sorts last.
  if (a.dev_.has_value() != b.dev_.has_value()) return a.dev_ ? -1 : 1;
  if (a.dev_) {
    if (int c = cmp(*a.dev_, *b.dev_)) return c;
  }

  // Local: absent sorts first.
  if (a.local_.empty() != b.local_.empty()) return a.local_.empty() ? -1 : 1;
  return compare_local(a.local_, b.local_);
}

}  // namespace licremedy
