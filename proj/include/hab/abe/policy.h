#pragma once

#include <initializer_list>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hab::abe {

/// Lowercases and trims an attribute name; throws if the result is empty or contains
/// characters outside [a-z0-9_.:-].
std::string normalize_attribute(std::string_view name);

/// Non-empty set of normalized attribute names.
class AttributeSet {
 public:
  AttributeSet() = default;
  AttributeSet(std::initializer_list<std::string_view> names);
  explicit AttributeSet(const std::vector<std::string>& names);

  bool contains(std::string_view name) const;
  bool empty() const { return names_.empty(); }
  std::size_t size() const { return names_.size(); }
  const std::set<std::string, std::less<>>& names() const { return names_; }
  std::vector<std::string> to_vector() const { return {names_.begin(), names_.end()}; }
  void insert(std::string_view name);

  friend bool operator==(const AttributeSet&, const AttributeSet&) = default;

 private:
  std::set<std::string, std::less<>> names_;
};

/// Threshold access tree. A leaf names one attribute; an inner node is satisfied when at
/// least `threshold` of its children are. AND is threshold n-of-n, OR is 1-of-n.
class PolicyTree {
 public:
  /// Empty placeholder (leaf with no attribute); satisfied by nothing.
  PolicyTree() = default;

  static PolicyTree leaf(std::string_view attribute);
  static PolicyTree threshold(int k, std::vector<PolicyTree> children);
  static PolicyTree all_of(std::vector<PolicyTree> children);
  static PolicyTree any_of(std::vector<PolicyTree> children);

  bool is_leaf() const { return children_.empty(); }
  const std::string& attribute() const { return attribute_; }
  int k() const { return k_; }
  const std::vector<PolicyTree>& children() const { return children_; }

  std::size_t leaf_count() const;
  std::size_t depth() const;
  /// Leaf attributes in pre-order (one entry per leaf, duplicates kept).
  std::vector<std::string> leaves() const;

  /// Canonical text: leaves verbatim, n-of-n as "(a AND b)", 1-of-n as "(a OR b)",
  /// otherwise "THRESHOLD(k, a, b, c)". parse_policy(to_string()) reproduces the tree.
  std::string to_string() const;

  friend bool operator==(const PolicyTree&, const PolicyTree&) = default;

 private:
  std::string attribute_;
  int k_ = 0;
  std::vector<PolicyTree> children_;
};

/// Grammar (keywords case-insensitive, AND binds tighter than OR):
///   expr    := and_expr ("OR" and_expr)*
///   and_expr:= primary ("AND" primary)*
///   primary := attribute | "(" expr ")" | "THRESHOLD" "(" k "," expr ("," expr)* ")"
/// Throws ParseError with the byte offset of the problem. There is no wildcard: an empty
/// policy is rejected.
PolicyTree parse_policy(std::string_view text);

bool satisfies(const PolicyTree& policy, const AttributeSet& attributes);

}  // namespace hab::abe
