#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hab/audit/inspector.h"
#include "hab/broker/broker.h"

namespace hab::broker {

struct StackOptions {
  /// ":memory:" keeps all state in process.
  std::string db_path = ":memory:";
  /// Directory for gatekeeper.log / brokers.log; unset keeps the logs in memory.
  std::optional<std::filesystem::path> log_dir;
  bool sync_logs = false;
  std::vector<storage::CloudBackendDescriptor> clouds;
  int broker_count = 1;
  int level = abe::kDefaultSecurityLevel;
  access::AccessControlConfig access;
  std::int64_t window_ms = 30'000;
  /// Rule file; unset uses the shipped defaults.
  std::optional<std::string> rules_path;
  std::string emergency_attribute = "emergency_room";
  std::string authority_name = "aia";
  const Clock* clock = &system_clock();
  RandomSource* rng = &system_random();
};

/// A complete service instance: database, logs, clouds, modules, inspector and broker.
class Stack {
 public:
  explicit Stack(const StackOptions& options);
  ~Stack();

  Broker& broker() { return *broker_; }
  audit::InspectorService& inspector() { return *inspector_; }
  const BrokerServices& services() const { return broker_->services(); }
  AttributeAuthority& authority() { return *services().authority; }
  std::shared_ptr<audit::LogStorage> gatekeeper_storage() const { return gk_storage_; }
  std::shared_ptr<audit::LogStorage> brokers_log_storage() const { return bl_storage_; }
  const audit::RuleSet& rules() const { return rules_; }
  const StackOptions& options() const { return options_; }

 private:
  StackOptions options_;
  std::shared_ptr<audit::LogStorage> gk_storage_;
  std::shared_ptr<audit::LogStorage> bl_storage_;
  audit::RuleSet rules_;
  std::unique_ptr<Broker> broker_;
  std::unique_ptr<audit::InspectorService> inspector_;
};

}  // namespace hab::broker
