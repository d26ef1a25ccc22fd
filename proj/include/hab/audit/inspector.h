#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "hab/audit/alerts.h"
#include "hab/audit/records.h"
#include "hab/audit/rules.h"

namespace hab::audit {

struct InspectionInput {
  std::vector<std::string> gk_lines;
  std::vector<std::string> bl_lines;
  std::optional<std::string> bl_head;
};

/// Cross-matches the brokers' log against the gatekeeper log. Rules are evaluated for
/// brokers-log entries with seq >= from_seq; chain integrity is always checked in full.
/// Returned alerts carry no id or timestamp yet. Never throws on bad log content.
std::vector<Alert> inspect(const InspectionInput& input, const RuleSet& rules,
                           std::uint64_t from_seq = 1);

/// Continuous inspection with a cursor persisted in the database. Alerts go through the
/// AlertStore, whose dedup makes redelivery after a restart harmless.
class InspectorService {
 public:
  InspectorService(std::shared_ptr<LogStorage> gk, std::shared_ptr<LogStorage> bl,
                   std::shared_ptr<AlertStore> alerts, std::shared_ptr<store::Database> db,
                   RuleSet rules = RuleSet::defaults());
  ~InspectorService();

  /// One inspection pass; returns the number of newly delivered alerts.
  std::size_t poll_once();
  void start(std::chrono::milliseconds interval);
  void stop();
  std::uint64_t cursor() const;
  std::uint64_t polls() const { return polls_; }

 private:
  void save_cursor(std::uint64_t seq);

  std::shared_ptr<LogStorage> gk_, bl_;
  std::shared_ptr<AlertStore> alerts_;
  std::shared_ptr<store::Database> db_;
  RuleSet rules_;
  std::mutex poll_mu_;
  std::atomic<std::uint64_t> polls_{0};

  std::mutex run_mu_;
  std::condition_variable run_cv_;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace hab::audit
