#include "hab/api/client.h"

#include "hab/common/error.h"
#include "httplib.h"

namespace hab::api {

class ApiClient::Impl {
 public:
  Impl(const std::string& host, int port) : client(host, port) {
    client.set_connection_timeout(5);
    client.set_read_timeout(120);
  }
  httplib::Client client;
};

namespace {

ApiResponse convert(const httplib::Result& res, const std::string& path) {
  if (!res) throw Error(ErrorCode::kBackendFailure, "request to " + path + " failed: " + httplib::to_string(res.error()));
  ApiResponse out;
  out.status = res->status;
  out.body = audit::Json::parse(res->body, nullptr, false);
  if (out.body.is_discarded()) out.body = audit::Json{{"raw", res->body}};
  return out;
}

}  // namespace

ApiClient::ApiClient(std::string host, int port) : impl_(std::make_unique<Impl>(host, port)) {}
ApiClient::~ApiClient() = default;

ApiResponse ApiClient::get(const std::string& path) {
  httplib::Headers h;
  if (!token_.empty()) h.emplace("Authorization", "Bearer " + token_);
  return convert(impl_->client.Get(path, h), path);
}

ApiResponse ApiClient::post(const std::string& path, const audit::Json& body) {
  httplib::Headers h;
  if (!token_.empty()) h.emplace("Authorization", "Bearer " + token_);
  return convert(impl_->client.Post(path, h, body.dump(), "application/json"), path);
}

}  // namespace hab::api
