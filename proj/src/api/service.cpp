#include "hab/api/service.h"

#include "hab/abe/policy.h"
#include "hab/common/bytes.h"
#include "hab/common/error.h"
#include "httplib.h"

namespace hab::api {

using audit::Json;
using broker::Broker;

namespace {

std::vector<std::string> segments(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path.substr(0, path.find('?'))) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  return j;
}

std::string str(const Json& j, const char* key, bool required = true) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) throw Error(ErrorCode::kInvalidArgument, std::string("missing field ") + key);
    return {};
  }
  if (!it->is_string()) throw Error(ErrorCode::kInvalidArgument, std::string(key) + " must be a string");
  return it->get<std::string>();
}

Bytes b64(const Json& j, const char* key) {
  const std::string s = str(j, key);
  try {
    return base64_decode(s);
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidArgument, std::string(key) + " is not valid base64");
  }
}

std::optional<Bytes> opt_b64(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return b64(j, key);
}

Json credential_json(const access::Credential& c) {
  return {{"user_id", c.user_id},
          {"username", c.username},
          {"kind", access::user_kind_name(c.kind)},
          {"attributes", c.attributes.to_vector()},
          {"broker_id", c.broker_id}};
}

Json revocation_json(const access::RevocationState& s) {
  return {{"patient_id", s.patient_id},
          {"scope", s.scope.key()},
          {"users", s.users},
          {"attributes", s.attributes}};
}

ApiResponse ok(Json body, int status = 200) { return {status, std::move(body)}; }

std::string bearer(const std::string& header) {
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() > prefix.size() && header.compare(0, prefix.size(), prefix) == 0)
    return header.substr(prefix.size());
  return {};
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnauthenticated:
    case ErrorCode::kBadCredentials:
      return 401;
    case ErrorCode::kForbidden:
    case ErrorCode::kNotOwner:
    case ErrorCode::kAccessDenied:
      return 403;
    case ErrorCode::kNotFound:
    case ErrorCode::kUnknownFile:
      return 404;
    case ErrorCode::kConflict:
    case ErrorCode::kDuplicateId:
      return 409;
    case ErrorCode::kAccountLocked:
      return 423;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
    case ErrorCode::kMalformed:
    case ErrorCode::kInvalidGrant:
    case ErrorCode::kUnknownCloud:
    case ErrorCode::kUnsupportedLevel:
    case ErrorCode::kNotSatisfied:
    case ErrorCode::kIntegrityFailure:
    case ErrorCode::kLabelMismatch:
    case ErrorCode::kInconsistentParams:
    case ErrorCode::kDuplicateX:
    case ErrorCode::kInsufficientShares:
      return 400;
    case ErrorCode::kInsufficientLiveShares:
    case ErrorCode::kBackendFailure:
    case ErrorCode::kAuditFailure:
    case ErrorCode::kStorageFailure:
      return 503;
  }
  return 500;
}

class ApiService::Http {
 public:
  httplib::Server server;
};

ApiService::ApiService(ApiConfig config) : config_(std::move(config)) {
  config_.validate();
  broker::StackOptions o;
  o.db_path = config_.db_path;
  if (!config_.log_dir.empty()) o.log_dir = config_.log_dir;
  o.clouds = config_.backends;
  o.broker_count = config_.broker_count;
  o.level = config_.security_level;
  o.access.attempt_limit = config_.attempt_limit;
  o.access.session_ttl_ms = static_cast<std::int64_t>(config_.session_ttl_seconds) * 1000;
  o.window_ms = static_cast<std::int64_t>(config_.window_seconds) * 1000;
  if (!config_.rules_path.empty()) o.rules_path = config_.rules_path;
  if (config_.test_seed) {
    seeded_rng_ = std::make_unique<SeededRandom>(*config_.test_seed);
    o.rng = seeded_rng_.get();
  }
  stack_ = std::make_unique<broker::Stack>(o);
  http_ = std::make_unique<Http>();

  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r{req.method, req.path, req.body, req.get_header_value("Authorization")};
    ApiResponse out = dispatch(r);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  http_->server.Get(R"(/.*)", handler);
  http_->server.Post(R"(/.*)", handler);
}

ApiService::~ApiService() { stop(); }

ApiResponse ApiService::dispatch(const ApiRequest& request) {
  try {
    return route(request, bearer(request.authorization));
  } catch (const Error& e) {
    return {http_status(e.code()),
            {{"error", std::string(error_code_name(e.code()))}, {"message", e.what()}}};
  } catch (const Json::exception& e) {
    return {400, {{"error", "InvalidArgument"}, {"message", e.what()}}};
  } catch (const std::exception& e) {
    return {500, {{"error", "Internal"}, {"message", e.what()}}};
  }
}

ApiResponse ApiService::route(const ApiRequest& req, const std::string& token) {
  Broker& b = stack_->broker();
  const auto seg = segments(req.path);
  const bool get = req.method == "GET";
  const bool post = req.method == "POST";
  auto is = [&](std::initializer_list<const char*> parts) {
    if (seg.size() != parts.size()) return false;
    std::size_t i = 0;
    for (const char* p : parts) {
      if (*p != '*' && seg[i] != p) return false;
      ++i;
    }
    return true;
  };

  if (get && is({"health"})) {
    Json clouds = Json::object();
    for (const auto& [id, healthy] : b.services().mcp->health()) clouds[id] = healthy;
    return ok({{"status", "ready"},
               {"brokers", config_.broker_count},
               {"clouds", clouds},
               {"security_level", b.services().keys->level()},
               {"default_t", config_.default_t},
               {"default_n", config_.default_n},
               {"emergency_attribute", b.config().emergency_attribute},
               {"public_params", base64_encode(b.public_params().serialize())}});
  }

  if (post && is({"register"})) {
    Json body = parse_body(req.body);
    std::optional<broker::AttributeGrant> grant;
    if (body.contains("grant") && !body["grant"].is_null())
      grant = broker::AttributeGrant::from_json(body["grant"]);
    auto reg = b.register_user(str(body, "username"), str(body, "password"), grant);
    Json out = credential_json(reg.credential);
    out["key"] = base64_encode(reg.key.serialize());
    out["public_params"] = base64_encode(b.public_params().serialize());
    return ok(out, 201);
  }

  if (post && is({"login"})) {
    Json body = parse_body(req.body);
    auto s = b.login(str(body, "username"), str(body, "password"));
    return ok({{"token", s.token},
               {"user_id", s.user_id},
               {"kind", access::user_kind_name(s.kind)},
               {"broker_id", s.broker_id},
               {"expires_at_ms", s.expires_at_ms},
               {"public_params", base64_encode(b.public_params().serialize())}});
  }

  if (post && is({"uploads"})) {
    Json body = parse_body(req.body);
    std::optional<FileId> target;
    if (auto t = str(body, "target_file_id", false); !t.empty()) target = FileId::from_hex(t);
    auto item = b.submit_upload(token, str(body, "patient_id"), b64(body, "payload"), target);
    return ok(item.to_json(false), 201);
  }

  if (get && is({"reviews"})) {
    Json items = Json::array();
    for (const auto& r : b.pending_reviews(token)) items.push_back(r.to_json(true));
    return ok({{"reviews", items}});
  }

  if (post && is({"reviews", "*", "decision"})) {
    Json body = parse_body(req.body);
    const std::string decision = str(body, "decision");
    broker::ReviewDecision d;
    if (decision == "approve") {
      d.approve = true;
      d.policy = abe::parse_policy(str(body, "policy"));
      if (body.contains("clouds")) {
        d.clouds = body["clouds"].get<std::vector<std::string>>();
      } else {
        auto ids = b.services().mcp->cloud_ids();
        d.clouds.assign(ids.begin(), ids.begin() + std::min<std::size_t>(ids.size(), config_.default_n));
      }
      d.t = body.value("t", config_.default_t);
      d.document = abe::EncryptedDocument::deserialize(b64(body, "document"));
      if (auto w = opt_b64(body, "owner_wrap")) d.owner_wrap = abe::KeyWrap::deserialize(*w);
      if (auto w = opt_b64(body, "emergency_wrap")) d.emergency_wrap = abe::KeyWrap::deserialize(*w);
    } else if (decision != "reject") {
      throw Error(ErrorCode::kInvalidArgument, "decision must be approve or reject");
    }
    auto meta = b.decide(token, seg[1], d);
    if (!meta) return ok({{"review_id", seg[1]}, {"status", "rejected"}});
    Json out = meta->to_json();
    out["review_id"] = seg[1];
    out["status"] = "approved";
    return ok(out, 201);
  }

  if (get && is({"files", "*"})) {
    const FileId id = FileId::from_hex(seg[1]);
    auto doc = b.retrieve(token, id);
    return ok({{"file_id", id.hex()}, {"document", base64_encode(doc.serialize())}});
  }

  if (post && is({"files", "*", "policy"})) {
    Json body = parse_body(req.body);
    const FileId id = FileId::from_hex(seg[1]);
    std::optional<abe::KeyWrap> rewrap;
    if (auto w = opt_b64(body, "rewrap")) rewrap = abe::KeyWrap::deserialize(*w);
    auto rec = b.update_policy(token, id, abe::parse_policy(str(body, "policy")), rewrap);
    return ok({{"file_id", id.hex()},
               {"revision", rec.revision},
               {"policy", rec.policy.to_string()},
               {"rewrapped", rewrap.has_value()},
               {"updated_at_ms", rec.updated_at_ms}});
  }

  if (post && is({"revocations"})) {
    Json body = parse_body(req.body);
    broker::RevocationRequest r;
    const std::string target = str(body, "target");
    if (target == "user") r.target = broker::RevocationRequest::Target::kUser;
    else if (target == "attribute") r.target = broker::RevocationRequest::Target::kAttribute;
    else throw Error(ErrorCode::kInvalidArgument, "target must be user or attribute");
    r.value = str(body, "value");
    if (auto f = str(body, "file_id", false); !f.empty()) r.file = FileId::from_hex(f);
    r.undo = body.value("undo", false);
    return ok(revocation_json(b.revoke(token, r)));
  }

  if (post && is({"access-requests"})) {
    Json body = parse_body(req.body);
    auto n = b.request_access(token, FileId::from_hex(str(body, "file_id")),
                              str(body, "message", false));
    return ok(n.to_json(), 201);
  }

  if (post && is({"emergency", "*", "*"})) {
    auto bundle = b.emergency_retrieve(token, seg[1], FileId::from_hex(seg[2]));
    return ok({{"file_id", bundle.file_id.hex()},
               {"patient_id", bundle.patient_id},
               {"document", base64_encode(bundle.document.serialize())}});
  }

  if (get && is({"alerts"})) {
    auto inbox = b.inbox(token);
    Json alerts = Json::array(), notices = Json::array();
    for (const auto& a : inbox.alerts) alerts.push_back(a.to_json());
    for (const auto& n : inbox.notices) notices.push_back(n.to_json());
    return ok({{"alerts", alerts}, {"notices", notices}});
  }

  if (get && is({"audit", "chain-status"})) {
    auto st = b.chain_status(token);
    Json out{{"intact", st.intact}, {"reason", st.reason}};
    out["broken_at"] = st.broken_at ? Json(*st.broken_at) : Json(nullptr);
    out["entries"] = b.services().brokers_log->last_seq();
    return ok(out);
  }

  return {404, {{"error", "NotFound"}, {"message", "no route for " + req.method + " " + req.path}}};
}

int ApiService::start() {
  int port = config_.listen_port;
  if (port == 0) {
    port = http_->server.bind_to_any_port(config_.listen_host);
  } else if (!http_->server.bind_to_port(config_.listen_host, port)) {
    port = -1;
  }
  if (port < 0)
    throw Error(ErrorCode::kInvalidArgument,
                "cannot bind " + config_.listen_host + ":" + std::to_string(config_.listen_port));
  stack_->inspector().start(std::chrono::milliseconds(config_.inspector_interval_ms));
  thread_ = std::thread([this] { http_->server.listen_after_bind(); });
  http_->server.wait_until_ready();
  return port;
}

void ApiService::run() {
  if (!http_->server.bind_to_port(config_.listen_host, config_.listen_port))
    throw Error(ErrorCode::kInvalidArgument,
                "cannot bind " + config_.listen_host + ":" + std::to_string(config_.listen_port));
  stack_->inspector().start(std::chrono::milliseconds(config_.inspector_interval_ms));
  http_->server.listen_after_bind();
  stack_->inspector().stop();
}

void ApiService::stop() {
  if (http_) http_->server.stop();
  if (thread_.joinable()) thread_.join();
  if (stack_) stack_->inspector().stop();
}

}  // namespace hab::api
