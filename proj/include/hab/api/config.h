#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hab/access/access_control.h"
#include "hab/audit/records.h"
#include "hab/storage/backend.h"

namespace hab::api {

/// Service configuration. JSON keys match the field names; every key is optional:
///   {"listen_host", "listen_port", "broker_count", "default_t", "default_n",
///    "backends": [{"cloud_id", "kind": "in-memory|local-directory|latency-mock",
///                  "display_name", "root", "delay_ms", "failure_rate"}],
///    "attempt_limit", "window_seconds", "db_path", "log_dir", "test_seed",
///    "security_level", "rules_path", "session_ttl_seconds", "inspector_interval_ms"}
/// HAB_LISTEN ("host:port") and HAB_DB override the listen address and database path.
struct ApiConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;  // 0 picks a free port
  int broker_count = 1;
  int default_t = 3;
  int default_n = 5;
  std::vector<storage::CloudBackendDescriptor> backends;
  int attempt_limit = 5;
  int window_seconds = 30;
  std::string db_path = "hab.db";
  std::string log_dir;  // empty keeps the logs in memory
  /// Deterministic randomness for tests; never set in deployment.
  std::optional<std::string> test_seed;
  int security_level = 128;
  std::string rules_path;
  int session_ttl_seconds = 3600;
  int inspector_interval_ms = 1000;

  /// Throws Error(kInvalidArgument) naming the first bad field.
  void validate() const;
  static ApiConfig from_json(const audit::Json& j);
  audit::Json to_json() const;
  static ApiConfig load(const std::string& path);
  /// Applies HAB_LISTEN and HAB_DB from the environment.
  void apply_env();
  /// `n` in-memory clouds named cloud-1..cloud-n.
  static std::vector<storage::CloudBackendDescriptor> memory_clouds(int n);
};

}  // namespace hab::api
