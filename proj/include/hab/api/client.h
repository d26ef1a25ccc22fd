#pragma once

#include <memory>
#include <string>

#include "hab/api/service.h"

namespace hab::api {

/// Minimal blocking HTTP client for the service's JSON endpoints.
class ApiClient {
 public:
  ApiClient(std::string host, int port);
  ~ApiClient();

  void set_token(std::string token) { token_ = std::move(token); }
  const std::string& token() const { return token_; }

  /// Throws Error(kBackendFailure) when the service cannot be reached.
  ApiResponse get(const std::string& path);
  ApiResponse post(const std::string& path, const audit::Json& body = audit::Json::object());

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
  std::string token_;
};

}  // namespace hab::api
