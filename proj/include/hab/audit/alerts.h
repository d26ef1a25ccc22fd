#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hab/audit/records.h"
#include "hab/common/clock.h"
#include "hab/store/database.h"

namespace hab::audit {

/// Recipient id of the system administrators' queue.
inline constexpr const char* kAdminRecipient = "admin";

namespace alert_category {
inline constexpr const char* kUnrequested = "unrequested-action";
inline constexpr const char* kFieldMismatch = "field-mismatch";
inline constexpr const char* kOutsideWindow = "outside-window";
inline constexpr const char* kMissingPrior = "missing-access-check";
inline constexpr const char* kExcess = "additional-action";
inline constexpr const char* kUnknownAction = "unknown-action";
inline constexpr const char* kChainBroken = "chain-broken";
inline constexpr const char* kMalformed = "malformed-entry";
inline constexpr const char* kInspectorHealth = "inspector-health";
}  // namespace alert_category

struct Alert {
  std::string alert_id;
  std::string rule_id;
  std::string category;
  std::optional<std::uint64_t> bl_seq;
  std::optional<std::uint64_t> gk_seq;
  std::string description;
  std::string severity;
  std::vector<std::string> recipients;
  std::int64_t raised_at_ms = 0;

  /// (rule, offending entry): at most one alert exists per key.
  std::string dedup_key() const;
  Json to_json() const;
};

/// Persistent alert store with one queue per recipient.
class AlertStore {
 public:
  AlertStore(std::shared_ptr<store::Database> db, const Clock& clock = system_clock());

  /// Stores and queues the alert for each recipient. Returns false (and leaves the store
  /// untouched) if an alert with the same dedup key exists.
  bool deliver(Alert alert);

  std::vector<Alert> all() const;
  std::vector<Alert> for_recipient(const std::string& recipient, bool include_acknowledged = false) const;
  void acknowledge(const std::string& recipient, const std::string& alert_id);
  std::size_t count() const;

 private:
  std::shared_ptr<store::Database> db_;
  const Clock& clock_;
};

}  // namespace hab::audit
