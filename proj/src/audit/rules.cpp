#include "hab/audit/rules.h"

#include <fstream>
#include <sstream>

#include "hab/audit/records.h"
#include "hab/common/error.h"

namespace hab::audit {

namespace detail {
extern const char* const kDefaultRulesJson;
}

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, "inspection rules: " + what);
}

std::vector<FieldPair> parse_pairs(const Json& j) {
  std::vector<FieldPair> out;
  if (!j.is_array()) bad("fields must be a list of pairs");
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
      bad("field pair must be [gk_field, bl_field]");
    out.push_back({p[0].get<std::string>(), p[1].get<std::string>()});
  }
  return out;
}

std::vector<std::string> parse_strings(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) bad(std::string(what) + " must be a non-empty list");
  std::vector<std::string> out;
  for (const auto& s : j) {
    if (!s.is_string()) bad(std::string(what) + " entries must be strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

}  // namespace

RuleSet::RuleSet(std::vector<InspectionRule> rules) : rules_(std::move(rules)) {}

RuleSet RuleSet::parse(std::string_view json_text) {
  Json doc = Json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) bad("not a JSON object");
  const double default_window = doc.value("window_seconds", 30.0);
  if (!doc.contains("rules") || !doc["rules"].is_array()) bad("missing rules list");

  std::vector<InspectionRule> rules;
  for (const auto& r : doc["rules"]) {
    if (!r.is_object()) bad("rule must be an object");
    InspectionRule rule;
    rule.rule_id = r.value("rule_id", "");
    rule.event_kind = r.value("event_kind", "");
    if (rule.rule_id.empty() || rule.event_kind.empty()) bad("rule_id and event_kind are required");
    rule.gk_kinds = parse_strings(r.value("gk_kinds", Json::array()), "gk_kinds");
    rule.fields = parse_pairs(r.value("fields", Json::array()));
    rule.window_ms = static_cast<std::int64_t>(r.value("window_seconds", default_window) * 1000.0);
    if (rule.window_ms < 0) bad("window must not be negative");
    rule.severity = r.value("severity", "high");
    rule.max_per_request = r.value("max_per_request", 0);
    if (r.contains("requires_prior")) {
      const auto& p = r["requires_prior"];
      PriorRequirement prior;
      prior.event_kinds = parse_strings(p.value("event_kinds", Json::array()), "event_kinds");
      prior.fields = parse_pairs(p.value("fields", Json::array()));
      const Json where = p.value("where", Json::object());
      if (!where.is_object()) bad("where must be an object");
      for (const auto& [k, v] : where.items()) {
        if (!v.is_string()) bad("where values must be strings");
        prior.where[k] = v.get<std::string>();
      }
      rule.requires_prior = std::move(prior);
    }
    for (const auto& existing : rules)
      if (existing.rule_id == rule.rule_id) bad("duplicate rule_id " + rule.rule_id);
    rules.push_back(std::move(rule));
  }
  if (rules.empty()) bad("rule set is empty");
  return RuleSet(std::move(rules));
}

RuleSet RuleSet::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read rule file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const RuleSet& RuleSet::defaults() {
  static const RuleSet rules = parse(detail::kDefaultRulesJson);
  return rules;
}

std::vector<const InspectionRule*> RuleSet::for_event(std::string_view event_kind) const {
  std::vector<const InspectionRule*> out;
  for (const auto& r : rules_)
    if (r.event_kind == event_kind) out.push_back(&r);
  return out;
}

void RuleSet::set_window_ms(std::int64_t window_ms) {
  for (auto& r : rules_) r.window_ms = window_ms;
}

}  // namespace hab::audit
