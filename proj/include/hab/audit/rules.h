#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hab::audit {

/// Gatekeeper field that must equal a brokers-log field.
struct FieldPair {
  std::string gk;
  std::string bl;
};

/// An earlier brokers-log entry of the same request that must exist, e.g. an allowing
/// access check before shares are fetched. `fields` pairs this entry's fields with the
/// prior entry's; `where` pins prior fields to literal values.
struct PriorRequirement {
  std::vector<std::string> event_kinds;
  std::vector<FieldPair> fields;
  std::map<std::string, std::string> where;
};

struct InspectionRule {
  std::string rule_id;
  std::string event_kind;  // "<MODULE>.<action>"
  std::vector<std::string> gk_kinds;
  std::vector<FieldPair> fields;
  std::int64_t window_ms = 30'000;
  std::string severity = "high";
  std::optional<PriorRequirement> requires_prior;
  /// Entries of this kind allowed per request; 0 = unlimited.
  int max_per_request = 0;
};

/// Rule file format:
///   {"window_seconds": 30,
///    "rules": [{"rule_id", "event_kind", "gk_kinds": [...], "fields": [[gk, bl], ...],
///               "window_seconds"?, "severity"?, "max_per_request"?,
///               "requires_prior"?: {"event_kinds": [...], "fields": [[this, prior]],
///                                   "where": {field: value}}}]}
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<InspectionRule> rules);

  /// Throws Error(kInvalidArgument) for an unusable rule file, including an empty one.
  static RuleSet parse(std::string_view json_text);
  static RuleSet load(const std::string& path);
  /// The rule file shipped in config/inspection_rules.json.
  static const RuleSet& defaults();

  const std::vector<InspectionRule>& rules() const { return rules_; }
  std::vector<const InspectionRule*> for_event(std::string_view event_kind) const;
  bool covers(std::string_view event_kind) const { return !for_event(event_kind).empty(); }
  /// Overrides every rule's pairing window.
  void set_window_ms(std::int64_t window_ms);

 private:
  std::vector<InspectionRule> rules_;
};

}  // namespace hab::audit
