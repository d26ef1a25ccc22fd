#pragma once

#include <map>
#include <memory>
#include <string>
#include <thread>

#include "hab/api/config.h"
#include "hab/broker/stack.h"
#include "hab/common/error.h"

namespace hab::api {

struct ApiRequest {
  std::string method;  // "GET" / "POST"
  std::string path;
  std::string body;
  /// Value of the Authorization header ("Bearer <token>"), possibly empty.
  std::string authorization;
};

struct ApiResponse {
  int status = 200;
  audit::Json body = audit::Json::object();
};

/// HTTP status for a library error.
int http_status(ErrorCode code);

/// HTTP+JSON surface over one Stack. Binary values travel base64-encoded.
///
///   POST /register                 {username, password, grant?} -> credential + user key
///   POST /login                    {username, password} -> {token, ...}
///   POST /uploads                  {patient_id, payload, target_file_id?}
///   GET  /reviews
///   POST /reviews/{id}/decision    {decision, policy, clouds?, t?, document, owner_wrap?,
///                                   emergency_wrap?}
///   GET  /files/{id}
///   POST /files/{id}/policy        {policy, rewrap?}
///   POST /revocations              {target: user|attribute, value, file_id?, undo?}
///   POST /access-requests          {file_id, message?}
///   POST /emergency/{patient}/{file}
///   GET  /alerts
///   GET  /audit/chain-status
///   GET  /health
class ApiService {
 public:
  explicit ApiService(ApiConfig config);
  ~ApiService();

  /// Routing without the network, used by the HTTP handlers and by tests.
  ApiResponse dispatch(const ApiRequest& request);

  /// Binds and serves on a background thread; returns the bound port. Starts the inspector.
  int start();
  /// Blocks serving on the calling thread.
  void run();
  void stop();

  broker::Stack& stack() { return *stack_; }
  const ApiConfig& config() const { return config_; }

 private:
  class Http;
  ApiResponse route(const ApiRequest& request, const std::string& token);

  ApiConfig config_;
  std::unique_ptr<RandomSource> seeded_rng_;
  std::unique_ptr<broker::Stack> stack_;
  std::unique_ptr<Http> http_;
  std::thread thread_;
};

}  // namespace hab::api
