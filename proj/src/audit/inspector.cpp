#include "hab/audit/inspector.h"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "hab/audit/brokers_log.h"
#include "hab/common/error.h"

namespace hab::audit {

namespace {

constexpr const char* kChainRule = "chain-integrity";
constexpr const char* kFormatRule = "log-format";
constexpr const char* kCoverageRule = "rule-coverage";
constexpr const char* kHealthRule = "inspector-health";

std::vector<std::string> recipients_for(const BrokerLogEntry& e) {
  std::vector<std::string> out;
  if (auto p = e.field("patient_id"); p && !p->empty()) out.push_back(*p);
  out.push_back(kAdminRecipient);
  return out;
}

std::string describe(const BrokerLogEntry& e) {
  std::string s = e.kind() + " #" + std::to_string(e.seq);
  if (auto f = e.field("file_id")) s += " file " + *f;
  return s;
}

struct Context {
  std::unordered_map<std::uint64_t, GatekeeperEntry> gk;
  std::vector<BrokerLogEntry> bl;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_request;
};

bool prior_matches(const BrokerLogEntry& e, const BrokerLogEntry& prior,
                   const PriorRequirement& req) {
  if (std::find(req.event_kinds.begin(), req.event_kinds.end(), prior.kind()) ==
      req.event_kinds.end())
    return false;
  for (const auto& f : req.fields) {
    auto mine = e.field(f.gk);
    auto theirs = prior.field(f.bl);
    if (!mine || !theirs || *mine != *theirs) return false;
  }
  for (const auto& [k, v] : req.where) {
    auto got = prior.field(k);
    if (!got || *got != v) return false;
  }
  return true;
}

// First failed check of `rule` against entry `idx`, if any.
std::optional<std::pair<std::string, std::string>> evaluate(const Context& ctx, std::size_t idx,
                                                            const InspectionRule& rule) {
  const BrokerLogEntry& e = ctx.bl[idx];
  auto gk_it = ctx.gk.find(e.request);
  if (e.request == 0 || gk_it == ctx.gk.end())
    return std::pair{std::string(alert_category::kUnrequested),
                     describe(e) + " has no gatekeeper request"};
  const GatekeeperEntry& gk = gk_it->second;
  if (std::find(rule.gk_kinds.begin(), rule.gk_kinds.end(), gk.kind) == rule.gk_kinds.end())
    return std::pair{std::string(alert_category::kUnrequested),
                     describe(e) + " answers a " + gk.kind + " request #" +
                         std::to_string(gk.seq) + ", which does not call for it"};
  for (const auto& f : rule.fields) {
    auto want = gk.field(f.gk);
    auto got = e.field(f.bl);
    if (!want || !got || *want != *got)
      return std::pair{std::string(alert_category::kFieldMismatch),
                       describe(e) + ": " + f.bl + "=" + got.value_or("<missing>") +
                           " but request #" + std::to_string(gk.seq) + " has " + f.gk + "=" +
                           want.value_or("<missing>")};
  }
  const std::int64_t lag = e.ts_ms - gk.ts_ms;
  if (lag < 0 || lag > rule.window_ms)
    return std::pair{std::string(alert_category::kOutsideWindow),
                     describe(e) + " is " + std::to_string(lag) + " ms from request #" +
                         std::to_string(gk.seq)};

  const auto& siblings = ctx.by_request.at(e.request);
  if (rule.requires_prior) {
    bool found = false;
    for (std::size_t j : siblings) {
      if (j >= idx) break;
      if (prior_matches(e, ctx.bl[j], *rule.requires_prior)) {
        found = true;
        break;
      }
    }
    if (!found)
      return std::pair{std::string(alert_category::kMissingPrior),
                       describe(e) + " lacks a preceding " +
                           rule.requires_prior->event_kinds.front() + " for request #" +
                           std::to_string(gk.seq)};
  }
  if (rule.max_per_request > 0) {
    int same = 0;
    for (std::size_t j : siblings) {
      if (j > idx) break;
      if (ctx.bl[j].kind() == e.kind()) ++same;
    }
    if (same > rule.max_per_request)
      return std::pair{std::string(alert_category::kExcess),
                       describe(e) + " is action " + std::to_string(same) + " of its kind for request #" +
                           std::to_string(gk.seq) + " (allowed " +
                           std::to_string(rule.max_per_request) + ")"};
  }
  return std::nullopt;
}

}  // namespace

std::vector<Alert> inspect(const InspectionInput& input, const RuleSet& rules,
                           std::uint64_t from_seq) {
  std::vector<Alert> alerts;
  Context ctx;

  for (std::size_t i = 0; i < input.gk_lines.size(); ++i) {
    try {
      auto e = GatekeeperEntry::parse(input.gk_lines[i]);
      ctx.gk.emplace(e.seq, std::move(e));
    } catch (const std::exception& ex) {
      Alert a;
      a.rule_id = kFormatRule;
      a.category = alert_category::kMalformed;
      a.gk_seq = i + 1;
      a.description = "gatekeeper line " + std::to_string(i + 1) + " is malformed: " + ex.what();
      a.severity = "high";
      a.recipients = {kAdminRecipient};
      alerts.push_back(std::move(a));
    }
  }

  ChainStatus chain = verify_lines(input.bl_lines, input.bl_head, true);
  if (!chain.intact) {
    Alert a;
    a.rule_id = kChainRule;
    a.category = alert_category::kChainBroken;
    a.bl_seq = chain.broken_at;
    a.description = "brokers' log entry " + std::to_string(chain.broken_at.value_or(0)) +
                    " fails verification: " + chain.reason;
    a.severity = "critical";
    a.recipients = {kAdminRecipient};
    alerts.push_back(std::move(a));
  }

  for (std::size_t i = 0; i < input.bl_lines.size(); ++i) {
    try {
      ctx.bl.push_back(BrokerLogEntry::parse(input.bl_lines[i]));
    } catch (const std::exception& ex) {
      if (i + 1 < from_seq) continue;
      Alert a;
      a.rule_id = kFormatRule;
      a.category = alert_category::kMalformed;
      a.bl_seq = i + 1;
      a.description = "brokers' log line " + std::to_string(i + 1) + " is malformed: " + ex.what();
      a.severity = "high";
      a.recipients = {kAdminRecipient};
      alerts.push_back(std::move(a));
    }
  }
  for (std::size_t i = 0; i < ctx.bl.size(); ++i) ctx.by_request[ctx.bl[i].request].push_back(i);

  for (std::size_t i = 0; i < ctx.bl.size(); ++i) {
    const BrokerLogEntry& e = ctx.bl[i];
    if (e.seq < from_seq) continue;
    auto applicable = rules.for_event(e.kind());
    if (applicable.empty()) {
      Alert a;
      a.rule_id = kCoverageRule;
      a.category = alert_category::kUnknownAction;
      a.bl_seq = e.seq;
      a.gk_seq = e.request ? std::optional(e.request) : std::nullopt;
      a.description = describe(e) + " is not covered by any inspection rule";
      a.severity = "high";
      a.recipients = recipients_for(e);
      alerts.push_back(std::move(a));
      continue;
    }
    for (const InspectionRule* rule : applicable) {
      auto failure = evaluate(ctx, i, *rule);
      if (!failure) continue;
      Alert a;
      a.rule_id = rule->rule_id;
      a.category = failure->first;
      a.bl_seq = e.seq;
      a.gk_seq = e.request ? std::optional(e.request) : std::nullopt;
      a.description = failure->second;
      a.severity = rule->severity;
      a.recipients = recipients_for(e);
      alerts.push_back(std::move(a));
    }
  }
  return alerts;
}

InspectorService::InspectorService(std::shared_ptr<LogStorage> gk, std::shared_ptr<LogStorage> bl,
                                   std::shared_ptr<AlertStore> alerts,
                                   std::shared_ptr<store::Database> db, RuleSet rules)
    : gk_(std::move(gk)),
      bl_(std::move(bl)),
      alerts_(std::move(alerts)),
      db_(std::move(db)),
      rules_(std::move(rules)) {
  if (rules_.rules().empty()) throw Error(ErrorCode::kInvalidArgument, "rule set is empty");
  db_->exec(
      "CREATE TABLE IF NOT EXISTS inspector_state (name TEXT PRIMARY KEY, value INTEGER NOT NULL)");
}

InspectorService::~InspectorService() { stop(); }

std::uint64_t InspectorService::cursor() const {
  store::Statement st(*db_, "SELECT value FROM inspector_state WHERE name = 'bl_cursor'");
  return st.step() ? static_cast<std::uint64_t>(st.col_int(0)) : 0;
}

void InspectorService::save_cursor(std::uint64_t seq) {
  store::Statement(*db_,
                   "INSERT INTO inspector_state VALUES ('bl_cursor', ?) "
                   "ON CONFLICT(name) DO UPDATE SET value = excluded.value")
      .bind(1, static_cast<std::int64_t>(seq))
      .run();
}

std::size_t InspectorService::poll_once() {
  std::lock_guard lock(poll_mu_);
  ++polls_;
  const std::uint64_t from = cursor();
  InspectionInput input;
  try {
    // Head before lines: a concurrent append can only make the lines run ahead of it.
    input.bl_head = bl_->read_head();
    input.bl_lines = bl_->read_lines();
    input.gk_lines = gk_->read_lines();
  } catch (const std::exception& ex) {
    Alert a;
    a.rule_id = kHealthRule;
    a.category = alert_category::kInspectorHealth;
    a.bl_seq = from + 1;
    a.description = std::string("logs unreadable: ") + ex.what();
    a.severity = "critical";
    a.recipients = {kAdminRecipient};
    return alerts_->deliver(std::move(a)) ? 1 : 0;
  }
  std::size_t delivered = 0;
  for (auto& a : inspect(input, rules_, from + 1))
    if (alerts_->deliver(std::move(a))) ++delivered;
  if (input.bl_lines.size() > from) save_cursor(input.bl_lines.size());
  return delivered;
}

void InspectorService::start(std::chrono::milliseconds interval) {
  std::lock_guard lock(run_mu_);
  if (thread_.joinable()) return;
  stopping_ = false;
  thread_ = std::thread([this, interval] {
    std::unique_lock lk(run_mu_);
    while (!stopping_) {
      lk.unlock();
      try {
        poll_once();
      } catch (const std::exception&) {
        // Alert delivery itself failed; the next pass retries from the same cursor.
      }
      lk.lock();
      run_cv_.wait_for(lk, interval, [this] { return stopping_; });
    }
  });
}

void InspectorService::stop() {
  {
    std::lock_guard lock(run_mu_);
    stopping_ = true;
  }
  run_cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

}  // namespace hab::audit
