#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "hab/audit/records.h"
#include "hab/common/clock.h"

namespace hab::audit {

/// Request log written before any broker acts on a request. A failed write propagates as
/// Error(kAuditFailure) so the request itself fails.
class Gatekeeper {
 public:
  explicit Gatekeeper(std::shared_ptr<LogStorage> storage, const Clock& clock = system_clock());

  std::uint64_t record(const std::string& user_id, const std::string& kind, Json params,
                       int broker = 0);

  /// Parsed entries; malformed lines are skipped here and surface through the inspector.
  std::vector<GatekeeperEntry> entries() const;
  std::uint64_t last_seq() const;
  LogStorage& storage() { return *storage_; }

 private:
  std::shared_ptr<LogStorage> storage_;
  const Clock& clock_;
  mutable std::mutex mu_;
  std::uint64_t next_seq_ = 1;
};

}  // namespace hab::audit
