#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "hab/audit/records.h"
#include "hab/common/clock.h"

namespace hab::audit {

enum class Module { kDmm, kAacm, kKmm, kMcp };
std::string module_name(Module m);

struct ChainStatus {
  bool intact = true;
  /// Sequence number of the first bad entry (or of the entry after the last good one when
  /// the log was cut short).
  std::optional<std::uint64_t> broken_at;
  std::string reason;

  static ChainStatus ok() { return {}; }
  static ChainStatus broken(std::uint64_t seq, std::string why) { return {false, seq, std::move(why)}; }
};

/// Verifies raw log lines. Each line must parse, re-serialize to exactly the same bytes,
/// recompute its hash and link to its predecessor. `head` (if given) must match the last
/// entry, which catches truncation. With `allow_tail`, entries past the head are accepted
/// (a reader racing a writer between its line append and head update).
ChainStatus verify_lines(const std::vector<std::string>& lines,
                         const std::optional<std::string>& head = std::nullopt,
                         bool allow_tail = false);

/// Hash-chained log of broker actions with a single appender and a stored head pointer
/// ("<seq> <entry_hash>").
class BrokersLog {
 public:
  explicit BrokersLog(std::shared_ptr<LogStorage> storage, const Clock& clock = system_clock());

  BrokerLogEntry append(int broker, Module module, const std::string& action,
                        std::uint64_t request, Json params);

  /// Checks entries with from <= seq <= to plus the link into `from`. to == 0 means the
  /// end of the log; the head pointer is only consulted for open-ended ranges.
  /// Throws Error(kInvalidArgument) for a range outside the log.
  ChainStatus verify_chain(std::uint64_t from = 1, std::uint64_t to = 0) const;

  std::vector<BrokerLogEntry> entries() const;
  std::uint64_t last_seq() const;
  LogStorage& storage() { return *storage_; }

 private:
  std::shared_ptr<LogStorage> storage_;
  const Clock& clock_;
  mutable std::mutex mu_;
  std::uint64_t next_seq_ = 1;
  std::string last_hash_;
};

}  // namespace hab::audit
