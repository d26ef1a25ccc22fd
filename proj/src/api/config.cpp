#include "hab/api/config.h"

#include <cstdlib>
#include <fstream>
#include <set>

#include "hab/abe/group.h"
#include "hab/common/error.h"

namespace hab::api {

using audit::Json;

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, "config: " + what);
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const Json::exception&) {
    bad(std::string(key) + " has the wrong type");
  }
}

}  // namespace

void ApiConfig::validate() const {
  if (listen_port < 0 || listen_port > 65535) bad("listen_port out of range");
  if (listen_host.empty()) bad("listen_host is empty");
  if (broker_count < 1) bad("broker_count must be >= 1");
  if (default_n < 1 || default_n > 255) bad("default_n must be in 1..255");
  if (default_t < 1 || default_t > default_n) bad("default_t must satisfy 1 <= T <= N");
  if (backends.empty()) bad("no storage backends configured");
  if (static_cast<int>(backends.size()) < default_n) bad("fewer backends than default_n");
  std::set<std::string> ids;
  for (const auto& b : backends) {
    if (b.cloud_id.empty()) bad("backend without cloud_id");
    if (!ids.insert(b.cloud_id).second) bad("duplicate cloud_id " + b.cloud_id);
  }
  if (attempt_limit < 1) bad("attempt_limit must be >= 1");
  if (window_seconds < 1) bad("window_seconds must be >= 1");
  if (db_path.empty()) bad("db_path is empty");
  if (!abe::Group::supported_level(security_level)) bad("unsupported security_level");
  if (session_ttl_seconds < 1) bad("session_ttl_seconds must be >= 1");
  if (inspector_interval_ms < 1) bad("inspector_interval_ms must be >= 1");
}

ApiConfig ApiConfig::from_json(const Json& j) {
  if (!j.is_object()) bad("top level must be an object");
  ApiConfig c;
  read(j, "listen_host", c.listen_host);
  read(j, "listen_port", c.listen_port);
  read(j, "broker_count", c.broker_count);
  read(j, "default_t", c.default_t);
  read(j, "default_n", c.default_n);
  read(j, "attempt_limit", c.attempt_limit);
  read(j, "window_seconds", c.window_seconds);
  read(j, "db_path", c.db_path);
  read(j, "log_dir", c.log_dir);
  read(j, "security_level", c.security_level);
  read(j, "rules_path", c.rules_path);
  read(j, "session_ttl_seconds", c.session_ttl_seconds);
  read(j, "inspector_interval_ms", c.inspector_interval_ms);
  if (auto it = j.find("test_seed"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) bad("test_seed has the wrong type");
    c.test_seed = it->get<std::string>();
  }
  if (auto it = j.find("backends"); it != j.end()) {
    if (!it->is_array()) bad("backends must be a list");
    for (const auto& b : *it) {
      storage::CloudBackendDescriptor d;
      std::string kind = "in-memory", root;
      read(b, "cloud_id", d.cloud_id);
      read(b, "kind", kind);
      read(b, "display_name", d.display_name);
      read(b, "root", root);
      read(b, "delay_ms", d.delay_ms);
      read(b, "failure_rate", d.failure_rate);
      d.kind = storage::parse_backend_kind(kind);
      d.root = root;
      c.backends.push_back(std::move(d));
    }
  }
  return c;
}

Json ApiConfig::to_json() const {
  Json backs = Json::array();
  for (const auto& b : backends)
    backs.push_back({{"cloud_id", b.cloud_id},
                     {"kind", storage::backend_kind_name(b.kind)},
                     {"display_name", b.display_name},
                     {"root", b.root.string()},
                     {"delay_ms", b.delay_ms},
                     {"failure_rate", b.failure_rate}});
  Json j{{"listen_host", listen_host},
         {"listen_port", listen_port},
         {"broker_count", broker_count},
         {"default_t", default_t},
         {"default_n", default_n},
         {"backends", backs},
         {"attempt_limit", attempt_limit},
         {"window_seconds", window_seconds},
         {"db_path", db_path},
         {"log_dir", log_dir},
         {"security_level", security_level},
         {"rules_path", rules_path},
         {"session_ttl_seconds", session_ttl_seconds},
         {"inspector_interval_ms", inspector_interval_ms}};
  j["test_seed"] = test_seed ? Json(*test_seed) : Json(nullptr);
  return j;
}

ApiConfig ApiConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path);
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) bad(path + " is not valid JSON");
  return from_json(j);
}

void ApiConfig::apply_env() {
  if (const char* listen = std::getenv("HAB_LISTEN"); listen && *listen) {
    std::string v(listen);
    auto colon = v.rfind(':');
    if (colon == std::string::npos) bad("HAB_LISTEN must be host:port");
    listen_host = v.substr(0, colon);
    try {
      listen_port = std::stoi(v.substr(colon + 1));
    } catch (const std::exception&) {
      bad("HAB_LISTEN port is not a number");
    }
  }
  if (const char* db = std::getenv("HAB_DB"); db && *db) db_path = db;
}

std::vector<storage::CloudBackendDescriptor> ApiConfig::memory_clouds(int n) {
  std::vector<storage::CloudBackendDescriptor> out;
  for (int i = 1; i <= n; ++i) {
    storage::CloudBackendDescriptor d;
    d.cloud_id = "cloud-" + std::to_string(i);
    d.kind = storage::BackendKind::kInMemory;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace hab::api
