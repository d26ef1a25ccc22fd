#include "hab/abe/policy.h"

#include <algorithm>
#include <cctype>

#include "hab/common/error.h"

namespace hab::abe {

namespace {

bool attribute_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         c == ':';
}

bool keyword_equals(std::string_view word, std::string_view keyword) {
  if (word.size() != keyword.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i)
    if (std::toupper(static_cast<unsigned char>(word[i])) != keyword[i]) return false;
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PolicyTree parse() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError(pos_, "empty policy");
    PolicyTree tree = parse_or();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(pos_, "unexpected trailing input");
    return tree;
  }

 private:
  PolicyTree parse_or() {
    std::vector<PolicyTree> terms;
    terms.push_back(parse_and());
    while (accept_keyword("OR")) terms.push_back(parse_and());
    if (terms.size() == 1) return std::move(terms.front());
    return PolicyTree::any_of(std::move(terms));
  }

  PolicyTree parse_and() {
    std::vector<PolicyTree> terms;
    terms.push_back(parse_primary());
    while (accept_keyword("AND")) terms.push_back(parse_primary());
    if (terms.size() == 1) return std::move(terms.front());
    return PolicyTree::all_of(std::move(terms));
  }

  PolicyTree parse_primary() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError(pos_, "expected attribute or '('");
    if (text_[pos_] == '(') {
      ++pos_;
      PolicyTree inner = parse_or();
      expect(')');
      return inner;
    }
    const std::size_t start = pos_;
    std::string_view word = read_word();
    if (word.empty()) throw ParseError(start, "expected attribute or '('");
    if (keyword_equals(word, "AND") || keyword_equals(word, "OR"))
      throw ParseError(start, "unexpected operator");
    if (keyword_equals(word, "THRESHOLD")) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '(') return parse_threshold(start);
    }
    return PolicyTree::leaf(word);
  }

  PolicyTree parse_threshold(std::size_t start) {
    expect('(');
    skip_ws();
    const std::size_t k_pos = pos_;
    std::size_t digits_end = pos_;
    while (digits_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[digits_end])))
      ++digits_end;
    if (digits_end == pos_) throw ParseError(k_pos, "expected threshold count");
    if (digits_end - pos_ > 6) throw ParseError(k_pos, "threshold count too large");
    const int k = std::stoi(std::string(text_.substr(pos_, digits_end - pos_)));
    pos_ = digits_end;
    std::vector<PolicyTree> children;
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        children.push_back(parse_or());
        continue;
      }
      break;
    }
    expect(')');
    if (children.empty()) throw ParseError(start, "THRESHOLD needs at least one child");
    if (k < 1 || static_cast<std::size_t>(k) > children.size())
      throw ParseError(k_pos, "threshold " + std::to_string(k) + " out of range 1.." +
                                  std::to_string(children.size()));
    return PolicyTree::threshold(k, std::move(children));
  }

  std::string_view read_word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && attribute_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  bool accept_keyword(std::string_view keyword) {
    skip_ws();
    const std::size_t save = pos_;
    std::string_view word = read_word();
    if (keyword_equals(word, keyword)) return true;
    pos_ = save;
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      throw ParseError(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string normalize_attribute(std::string_view name) {
  std::size_t b = 0, e = name.size();
  while (b < e && std::isspace(static_cast<unsigned char>(name[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(name[e - 1]))) --e;
  std::string out;
  out.reserve(e - b);
  for (std::size_t i = b; i < e; ++i) {
    char c = name[i];
    if (!attribute_char(c))
      throw Error(ErrorCode::kInvalidArgument, "invalid character in attribute '" +
                                                   std::string(name) + "'");
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "empty attribute name");
  return out;
}

AttributeSet::AttributeSet(std::initializer_list<std::string_view> names) {
  for (auto n : names) insert(n);
}

AttributeSet::AttributeSet(const std::vector<std::string>& names) {
  for (const auto& n : names) insert(n);
}

void AttributeSet::insert(std::string_view name) { names_.insert(normalize_attribute(name)); }

bool AttributeSet::contains(std::string_view name) const { return names_.contains(name); }

PolicyTree PolicyTree::leaf(std::string_view attribute) {
  PolicyTree t;
  t.attribute_ = normalize_attribute(attribute);
  t.k_ = 1;
  return t;
}

PolicyTree PolicyTree::threshold(int k, std::vector<PolicyTree> children) {
  if (children.empty()) throw Error(ErrorCode::kInvalidArgument, "threshold node needs children");
  if (k < 1 || static_cast<std::size_t>(k) > children.size())
    throw Error(ErrorCode::kInvalidArgument, "threshold out of range");
  PolicyTree t;
  t.k_ = k;
  t.children_ = std::move(children);
  return t;
}

PolicyTree PolicyTree::all_of(std::vector<PolicyTree> children) {
  const int n = static_cast<int>(children.size());
  return threshold(n, std::move(children));
}

PolicyTree PolicyTree::any_of(std::vector<PolicyTree> children) {
  return threshold(1, std::move(children));
}

std::size_t PolicyTree::leaf_count() const {
  if (is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : children_) n += c.leaf_count();
  return n;
}

std::size_t PolicyTree::depth() const {
  std::size_t d = 0;
  for (const auto& c : children_) d = std::max(d, c.depth());
  return d + 1;
}

std::vector<std::string> PolicyTree::leaves() const {
  std::vector<std::string> out;
  auto walk = [&out](const PolicyTree& node, auto&& self) -> void {
    if (node.is_leaf()) {
      out.push_back(node.attribute_);
      return;
    }
    for (const auto& c : node.children_) self(c, self);
  };
  walk(*this, walk);
  return out;
}

std::string PolicyTree::to_string() const {
  if (is_leaf()) return attribute_;
  const std::size_t n = children_.size();
  std::string out;
  if (n >= 2 && (static_cast<std::size_t>(k_) == n || k_ == 1)) {
    const char* op = static_cast<std::size_t>(k_) == n ? " AND " : " OR ";
    out = "(";
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out += op;
      out += children_[i].to_string();
    }
    out += ")";
    return out;
  }
  out = "THRESHOLD(" + std::to_string(k_);
  for (const auto& c : children_) out += ", " + c.to_string();
  out += ")";
  return out;
}

PolicyTree parse_policy(std::string_view text) { return Parser(text).parse(); }

bool satisfies(const PolicyTree& policy, const AttributeSet& attributes) {
  if (policy.is_leaf()) return attributes.contains(policy.attribute());
  int count = 0;
  for (const auto& c : policy.children()) {
    if (satisfies(c, attributes) && ++count >= policy.k()) return true;
  }
  return false;
}

}  // namespace hab::abe
