#include "hab/broker/broker.h"

#include <algorithm>
#include <set>

#include "hab/common/crypto.h"
#include "hab/common/error.h"
#include "hab/sharing/shamir.h"

namespace hab::broker {

using audit::Json;
using audit::Module;
namespace rk = audit::request_kind;

namespace {

constexpr const char* kFilesSchema = R"sql(
CREATE TABLE IF NOT EXISTS files (
  file_id         TEXT PRIMARY KEY,
  patient_id      TEXT NOT NULL,
  doc_id          TEXT NOT NULL,
  t               INTEGER NOT NULL,
  n               INTEGER NOT NULL,
  clouds          TEXT NOT NULL,
  blob_id         TEXT NOT NULL,
  created_at      INTEGER NOT NULL,
  updated_at      INTEGER NOT NULL,
  version         INTEGER NOT NULL,
  owner_wrap      BLOB,
  emergency_wrap  BLOB,
  header_override BLOB
);
CREATE INDEX IF NOT EXISTS files_patient ON files (patient_id);
)sql";

constexpr const char* kFileColumns =
    "SELECT file_id, patient_id, doc_id, t, n, clouds, blob_id, created_at, updated_at, version, "
    "owner_wrap, emergency_wrap, header_override FROM files ";

std::optional<abe::KeyWrap> read_wrap(const store::Statement& st, int col) {
  if (st.col_null(col)) return std::nullopt;
  return abe::KeyWrap::deserialize(st.col_blob(col));
}

void bind_wrap(store::Statement& st, int idx, const std::optional<abe::KeyWrap>& w) {
  if (w) st.bind(idx, w->serialize());
  else st.bind_null(idx);
}

FileMeta read_meta(const store::Statement& st) {
  FileMeta m;
  m.file_id = FileId::from_hex(st.col_text(0));
  m.patient_id = st.col_text(1);
  m.doc_id = Id128::from_hex(st.col_text(2));
  m.t = static_cast<int>(st.col_int(3));
  m.n = static_cast<int>(st.col_int(4));
  m.cloud_ids = Json::parse(st.col_text(5)).get<std::vector<std::string>>();
  m.blob_id = Id128::from_hex(st.col_text(6));
  m.created_at_ms = st.col_int(7);
  m.updated_at_ms = st.col_int(8);
  m.version = static_cast<int>(st.col_int(9));
  m.owner_wrap = read_wrap(st, 10);
  m.emergency_wrap = read_wrap(st, 11);
  m.header_override = read_wrap(st, 12);
  return m;
}

bool is_single_leaf(const abe::PolicyTree& p, const std::string& attribute) {
  return p.is_leaf() && p.attribute() == attribute;
}

}  // namespace

int partition_of(const std::string& user_id, int broker_count) {
  if (broker_count < 1) throw Error(ErrorCode::kInvalidArgument, "broker count must be >= 1");
  const auto d = sha256(user_id);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
  return static_cast<int>(v % static_cast<std::uint64_t>(broker_count));
}

Json FileMeta::to_json() const {
  return {{"file_id", file_id.hex()},
          {"patient_id", patient_id},
          {"doc_id", doc_id.hex()},
          {"t", t},
          {"n", n},
          {"clouds", cloud_ids},
          {"version", version},
          {"created_at_ms", created_at_ms},
          {"updated_at_ms", updated_at_ms},
          {"emergency_access", emergency_wrap.has_value()}};
}

std::string RevocationRequest::operation() const {
  std::string op = undo ? "unrevoke-" : "revoke-";
  return op + (target == Target::kUser ? "user" : "attribute");
}

Broker::Broker(BrokerServices services, BrokerConfig config)
    : services_(std::move(services)),
      config_(std::move(config)),
      reviews_(services_.db, *services_.clock),
      notices_(services_.db, *services_.clock) {
  if (config_.broker_count < 1) throw Error(ErrorCode::kInvalidArgument, "broker count must be >= 1");
  config_.emergency_attribute = abe::normalize_attribute(config_.emergency_attribute);
  services_.db->exec(kFilesSchema);
}

std::vector<BrokerDescriptor> Broker::brokers() const {
  std::vector<BrokerDescriptor> out;
  for (int i = 0; i < config_.broker_count; ++i) out.push_back({i, config_.broker_count});
  return out;
}

Broker::Request Broker::begin(const std::string& token, const char* kind, Json params) {
  std::optional<access::Session> session;
  try {
    session = services_.access->validate(token);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnauthenticated) throw;
  }
  if (!session) params["session"] = "invalid";
  const std::uint64_t seq = services_.gatekeeper->record(
      session ? session->user_id : "", kind, std::move(params), session ? session->broker_id : 0);
  if (!session) throw Error(ErrorCode::kUnauthenticated, "session invalid or expired");
  return {*session, seq};
}

audit::BrokerLogEntry Broker::log(int broker, Module module, const std::string& action,
                                  std::uint64_t request, Json params) {
  return services_.brokers_log->append(broker, module, action, request, std::move(params));
}

std::mutex& Broker::patient_lock(const std::string& patient_id) {
  std::lock_guard lock(locks_mu_);
  auto& slot = patient_locks_[patient_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void Broker::set_fault_hook(std::function<void(std::string_view)> hook) {
  std::lock_guard lock(hook_mu_);
  fault_hook_ = std::move(hook);
}

void Broker::fault(std::string_view stage) {
  std::function<void(std::string_view)> hook;
  {
    std::lock_guard lock(hook_mu_);
    hook = fault_hook_;
  }
  if (hook) hook(stage);
}

void Broker::save_meta(const FileMeta& m) {
  store::Statement st(*services_.db,
                      "INSERT INTO files VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?) "
                      "ON CONFLICT(file_id) DO UPDATE SET doc_id = excluded.doc_id, t = excluded.t, "
                      "n = excluded.n, clouds = excluded.clouds, blob_id = excluded.blob_id, "
                      "updated_at = excluded.updated_at, version = excluded.version, "
                      "owner_wrap = excluded.owner_wrap, emergency_wrap = excluded.emergency_wrap, "
                      "header_override = excluded.header_override");
  st.bind(1, m.file_id.hex())
      .bind(2, m.patient_id)
      .bind(3, m.doc_id.hex())
      .bind(4, static_cast<std::int64_t>(m.t))
      .bind(5, static_cast<std::int64_t>(m.n))
      .bind(6, Json(m.cloud_ids).dump())
      .bind(7, m.blob_id.hex())
      .bind(8, m.created_at_ms)
      .bind(9, m.updated_at_ms)
      .bind(10, static_cast<std::int64_t>(m.version));
  bind_wrap(st, 11, m.owner_wrap);
  bind_wrap(st, 12, m.emergency_wrap);
  bind_wrap(st, 13, m.header_override);
  st.run();
}

std::optional<FileMeta> Broker::file(const FileId& file_id) const {
  store::Statement st(*services_.db, std::string(kFileColumns) + "WHERE file_id = ?");
  st.bind(1, file_id.hex());
  if (!st.step()) return std::nullopt;
  return read_meta(st);
}

std::vector<FileMeta> Broker::files_of(const std::string& patient_id) const {
  store::Statement st(*services_.db,
                      std::string(kFileColumns) + "WHERE patient_id = ? ORDER BY created_at, file_id");
  st.bind(1, patient_id);
  std::vector<FileMeta> out;
  while (st.step()) out.push_back(read_meta(st));
  return out;
}

abe::EncryptedDocument Broker::fetch_document(const FileMeta& meta) {
  Bytes bytes = services_.mcp->retrieve_file(meta.blob_id, meta.t);
  return abe::EncryptedDocument::deserialize(bytes);
}

// --- registration and sessions ------------------------------------------------------

Registration Broker::register_user(const std::string& username, const std::string& password,
                                   const std::optional<AttributeGrant>& grant) {
  const std::uint64_t seq =
      services_.gatekeeper->record("", rk::kRegister, Json{{"username", username}});

  std::optional<AttributeGrant> g = grant;
  if (!g && services_.authority) g = services_.authority->grant_for(username, services_.clock->now_ms());
  if (!g) throw Error(ErrorCode::kInvalidGrant, "no attribute grant for " + username);
  if (g->subject != username)
    throw Error(ErrorCode::kInvalidGrant, "attribute grant was issued to another subject");
  abe::AttributeSet attributes = services_.grants->verify_grant(*g);
  if (services_.access->find_username(username))
    throw Error(ErrorCode::kConflict, "username already registered");

  const std::string user_id = Id128::from_bytes(services_.rng->bytes(16)).hex();
  const int broker = partition_of(user_id, config_.broker_count);
  attributes.insert(self_attribute(user_id));

  log(broker, Module::kAacm, "create_credential", seq,
      {{"username", username},
       {"actor", user_id},
       {"kind", access::user_kind_name(g->kind)},
       {"broker_assigned", broker}});
  access::Credential cred =
      services_.access->create_credential(username, password, g->kind, attributes, broker, user_id);
  log(broker, Module::kKmm, "issue_key", seq,
      {{"username", username}, {"actor", user_id}, {"attributes", attributes.to_vector()}});
  return {cred, services_.keys->issue_key(attributes)};
}

access::Session Broker::login(const std::string& username, const std::string& password) {
  const std::uint64_t seq =
      services_.gatekeeper->record("", rk::kLogin, Json{{"username", username}});
  try {
    access::Session s = services_.access->authenticate(username, password);
    try {
      log(s.broker_id, Module::kAacm, "authenticate", seq,
          {{"username", username}, {"actor", s.user_id}, {"outcome", "success"}});
    } catch (...) {
      services_.access->logout(s.token);
      throw;
    }
    return s;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBadCredentials || e.code() == ErrorCode::kAccountLocked)
      log(0, Module::kAacm, "authenticate", seq,
          {{"username", username},
           {"outcome", e.code() == ErrorCode::kAccountLocked ? "locked" : "failure"}});
    throw;
  }
}

void Broker::logout(const std::string& token) { services_.access->logout(token); }

// --- upload and review --------------------------------------------------------------

ReviewItem Broker::submit_upload(const std::string& token, const std::string& patient_id,
                                 Bytes payload, std::optional<FileId> target_file) {
  Json params{{"patient_id", patient_id}};
  if (target_file) params["target_file_id"] = target_file->hex();
  auto req = begin(token, rk::kSubmitUpload, params);
  const auto& s = req.session;
  if (s.kind != access::UserKind::kDataProvider && s.kind != access::UserKind::kHospital)
    throw Error(ErrorCode::kForbidden, "only data providers submit records");
  auto patient = services_.access->find_user(patient_id);
  if (!patient || patient->kind != access::UserKind::kPatient)
    throw Error(ErrorCode::kNotFound, "unknown patient " + patient_id);
  if (target_file) {
    auto meta = file(*target_file);
    if (!meta || meta->patient_id != patient_id)
      throw Error(ErrorCode::kUnknownFile, "update target is not a file of this patient");
  }
  if (payload.empty()) throw Error(ErrorCode::kInvalidArgument, "empty payload");

  const std::string review_id = Id128::from_bytes(services_.rng->bytes(16)).hex();
  Json bl{{"actor", s.user_id}, {"patient_id", patient_id}, {"review_id", review_id}};
  if (target_file) bl["target_file_id"] = target_file->hex();
  log(patient->broker_id, Module::kDmm, "queue_review", req.seq, std::move(bl));
  return reviews_.create(s.user_id, patient_id, std::move(payload), target_file, review_id);
}

std::vector<ReviewItem> Broker::pending_reviews(const std::string& token) {
  auto req = begin(token, "list_reviews", Json::object());
  if (req.session.kind != access::UserKind::kPatient)
    throw Error(ErrorCode::kForbidden, "only patients review submissions");
  return reviews_.pending_for(req.session.user_id);
}

std::optional<FileMeta> Broker::decide(const std::string& token, const std::string& review_id,
                                       const ReviewDecision& d) {
  auto req = begin(token, rk::kApprove,
                   {{"review_id", review_id}, {"decision", d.approve ? "approve" : "reject"}});
  const auto& s = req.session;
  if (s.kind != access::UserKind::kPatient)
    throw Error(ErrorCode::kForbidden, "only patients decide on submissions");
  std::lock_guard patient_guard(patient_lock(s.user_id));

  auto item = reviews_.get(review_id);
  if (!item) throw Error(ErrorCode::kNotFound, "no such review " + review_id);
  if (item->patient_id != s.user_id) throw Error(ErrorCode::kNotOwner, "review belongs to another patient");
  if (item->status != ReviewStatus::kPending)
    throw Error(ErrorCode::kConflict, "review already " + review_status_name(item->status));
  const int broker = s.broker_id;
  const Json decide_params{{"actor", s.user_id},
                           {"review_id", review_id},
                           {"decision", d.approve ? "approve" : "reject"},
                           {"patient_id", s.user_id}};

  if (!d.approve) {
    log(broker, Module::kDmm, "decide_review", req.seq, decide_params);
    reviews_.decide(review_id, s.user_id, false);
    return std::nullopt;
  }

  if (!d.policy) throw Error(ErrorCode::kInvalidArgument, "approval needs an access policy");
  if (!d.document) throw Error(ErrorCode::kInvalidArgument, "approval needs the encrypted document");
  if (d.document->header.policy != *d.policy)
    throw Error(ErrorCode::kInvalidArgument, "document is wrapped under a different policy");
  if (d.clouds.empty()) throw Error(ErrorCode::kInvalidArgument, "approval needs storage clouds");
  if (std::set<std::string>(d.clouds.begin(), d.clouds.end()).size() != d.clouds.size())
    throw Error(ErrorCode::kInvalidArgument, "clouds must be distinct");
  for (const auto& c : d.clouds) services_.mcp->backend(c);
  const int n = static_cast<int>(d.clouds.size());
  if (d.t < 1 || d.t > n || n > sharing::kMaxShares)
    throw Error(ErrorCode::kInvalidArgument, "threshold must satisfy 1 <= t <= number of clouds");
  if (d.owner_wrap && !is_single_leaf(d.owner_wrap->policy, self_attribute(s.user_id)))
    throw Error(ErrorCode::kInvalidArgument, "owner wrap must name the patient alone");
  if (d.emergency_wrap && !is_single_leaf(d.emergency_wrap->policy, config_.emergency_attribute))
    throw Error(ErrorCode::kInvalidArgument, "emergency wrap must use the emergency attribute");

  std::optional<FileMeta> previous;
  if (item->target_file) {
    previous = file(*item->target_file);
    if (!previous || previous->patient_id != s.user_id)
      throw Error(ErrorCode::kUnknownFile, "update target no longer exists");
  }

  const std::int64_t now = services_.clock->now_ms();
  FileMeta meta;
  meta.file_id = previous ? previous->file_id : Id128::from_bytes(services_.rng->bytes(16));
  meta.patient_id = s.user_id;
  meta.doc_id = d.document->doc_id;
  meta.t = d.t;
  meta.n = n;
  meta.cloud_ids = d.clouds;
  meta.blob_id = Id128::from_bytes(services_.rng->bytes(16));
  meta.created_at_ms = previous ? previous->created_at_ms : now;
  meta.updated_at_ms = now;
  meta.version = previous ? previous->version + 1 : 1;
  meta.owner_wrap = d.owner_wrap;
  meta.emergency_wrap = d.emergency_wrap;

  log(broker, Module::kDmm, "decide_review", req.seq, decide_params);
  const Bytes sealed = d.document->serialize();
  auto shares = sharing::split(meta.blob_id, sealed, n, d.t, *services_.rng);
  log(broker, Module::kMcp, "store_shares", req.seq,
      {{"actor", s.user_id},
       {"review_id", review_id},
       {"file_id", meta.file_id.hex()},
       {"blob_id", meta.blob_id.hex()},
       {"clouds", d.clouds},
       {"t", d.t},
       {"n", n},
       {"version", meta.version},
       {"patient_id", s.user_id}});
  services_.mcp->upload_shares(meta.blob_id, shares, d.clouds);

  try {
    fault("after_upload");
    log(broker, Module::kAacm, "create_policy", req.seq,
        {{"actor", s.user_id},
         {"review_id", review_id},
         {"file_id", meta.file_id.hex()},
         {"policy", d.policy->to_string()},
         {"version", meta.version},
         {"patient_id", s.user_id}});
    store::Transaction tx(*services_.db);
    reviews_.decide(review_id, s.user_id, true);
    if (previous) services_.access->store_policy(s, meta.file_id, *d.policy);
    else services_.access->create_policy(s.user_id, meta.file_id, *d.policy);
    save_meta(meta);
    fault("before_commit");
    tx.commit();
  } catch (...) {
    try {
      log(broker, Module::kMcp, "delete_shares", req.seq,
          {{"actor", s.user_id},
           {"review_id", review_id},
           {"file_id", meta.file_id.hex()},
           {"blob_id", meta.blob_id.hex()},
           {"reason", "rollback"},
           {"patient_id", s.user_id}});
      services_.mcp->delete_file(meta.blob_id);
    } catch (const std::exception&) {
      // Unreachable objects are kept on the orphan list by the proxy.
    }
    throw;
  }

  if (previous) {
    log(broker, Module::kMcp, "delete_shares", req.seq,
        {{"actor", s.user_id},
         {"review_id", review_id},
         {"file_id", meta.file_id.hex()},
         {"blob_id", previous->blob_id.hex()},
         {"reason", "superseded"},
         {"patient_id", s.user_id}});
    try {
      services_.mcp->delete_file(previous->blob_id);
    } catch (const Error&) {
      // Same as above: leftovers are orphans, the new version is already committed.
    }
  }
  return meta;
}

// --- retrieval ------------------------------------------------------------------------

abe::EncryptedDocument Broker::retrieve(const std::string& token, const FileId& file_id) {
  auto req = begin(token, rk::kRetrieve, {{"file_id", file_id.hex()}});
  const auto& s = req.session;
  auto meta = file(file_id);
  if (!meta) {
    log(s.broker_id, Module::kAacm, "access_check", req.seq,
        {{"actor", s.user_id}, {"file_id", file_id.hex()}, {"decision", "deny"},
         {"reason", "unknown-file"}});
    throw Error(ErrorCode::kNotFound, "no such file " + file_id.hex());
  }
  const int broker = partition_of(meta->patient_id, config_.broker_count);
  const auto decision = services_.access->check_access(s.user_id, file_id);
  log(broker, Module::kAacm, "access_check", req.seq,
      {{"actor", s.user_id},
       {"file_id", file_id.hex()},
       {"patient_id", meta->patient_id},
       {"decision", decision.allowed ? "allow" : "deny"},
       {"reason", access::deny_reason_name(decision.reason)}});
  if (!decision.allowed) {
    if (decision.reason == access::DenyReason::kPolicyNotSatisfied) {
      log(broker, Module::kDmm, "access_request", req.seq,
          {{"actor", s.user_id}, {"file_id", file_id.hex()}, {"patient_id", meta->patient_id},
           {"automatic", true}});
      notices_.add({"", meta->patient_id, notice_kind::kAccessRequest, s.user_id, file_id,
                    "access denied by policy; requestor asks for a policy change", "normal", 0});
    }
    throw Error(ErrorCode::kAccessDenied, access::deny_reason_name(decision.reason));
  }
  log(broker, Module::kMcp, "retrieve_shares", req.seq,
      {{"actor", s.user_id},
       {"file_id", file_id.hex()},
       {"blob_id", meta->blob_id.hex()},
       {"patient_id", meta->patient_id}});
  abe::EncryptedDocument doc = fetch_document(*meta);
  if (s.user_id == meta->patient_id && meta->owner_wrap) return abe::rewrap(doc, *meta->owner_wrap);
  if (meta->header_override) return abe::rewrap(doc, *meta->header_override);
  return doc;
}

Notice Broker::request_access(const std::string& token, const FileId& file_id,
                              const std::string& message) {
  auto req = begin(token, rk::kAccessRequest, {{"file_id", file_id.hex()}});
  const auto& s = req.session;
  auto meta = file(file_id);
  if (!meta) throw Error(ErrorCode::kUnknownFile, "no such file " + file_id.hex());
  log(partition_of(meta->patient_id, config_.broker_count), Module::kDmm, "access_request", req.seq,
      {{"actor", s.user_id}, {"file_id", file_id.hex()}, {"patient_id", meta->patient_id},
       {"automatic", false}});
  return notices_.add({"", meta->patient_id, notice_kind::kAccessRequest, s.user_id, file_id,
                       message.empty() ? "requestor asks for access" : message, "normal", 0});
}

// --- patient controls -------------------------------------------------------------------

access::PolicyRecord Broker::update_policy(const std::string& token, const FileId& file_id,
                                           const abe::PolicyTree& policy,
                                           const std::optional<abe::KeyWrap>& rewrap) {
  auto req = begin(token, rk::kPolicyUpdate,
                   {{"file_id", file_id.hex()}, {"policy", policy.to_string()}});
  const auto& s = req.session;
  auto meta = file(file_id);
  if (!meta) throw Error(ErrorCode::kUnknownFile, "no such file " + file_id.hex());
  if (meta->patient_id != s.user_id) throw Error(ErrorCode::kNotOwner, "only the owner may change the policy");
  if (rewrap && rewrap->policy != policy)
    throw Error(ErrorCode::kInvalidArgument, "re-wrapped key does not carry the new policy");
  std::lock_guard patient_guard(patient_lock(s.user_id));

  log(s.broker_id, Module::kAacm, "store_policy", req.seq,
      {{"actor", s.user_id},
       {"file_id", file_id.hex()},
       {"policy", policy.to_string()},
       {"rewrapped", rewrap.has_value()},
       {"patient_id", s.user_id}});
  store::Transaction tx(*services_.db);
  access::PolicyRecord rec = services_.access->store_policy(s, file_id, policy);
  if (rewrap) {
    meta->header_override = rewrap;
    meta->updated_at_ms = services_.clock->now_ms();
    save_meta(*meta);
  }
  tx.commit();
  return rec;
}

access::RevocationState Broker::revoke(const std::string& token, const RevocationRequest& r) {
  const std::string scope = r.file ? r.file->hex() : "*";
  auto req = begin(token, rk::kRevoke,
                   {{"operation", r.operation()}, {"target", r.value}, {"scope", scope}});
  const auto& s = req.session;
  if (s.kind != access::UserKind::kPatient)
    throw Error(ErrorCode::kForbidden, "only patients manage revocations");
  if (r.value.empty()) throw Error(ErrorCode::kInvalidArgument, "revocation target is empty");
  if (r.file) {
    auto meta = file(*r.file);
    if (!meta) throw Error(ErrorCode::kUnknownFile, "no such file " + r.file->hex());
    if (meta->patient_id != s.user_id) throw Error(ErrorCode::kNotOwner, "file belongs to another patient");
  }
  std::lock_guard patient_guard(patient_lock(s.user_id));
  log(s.broker_id, Module::kAacm, "revoke", req.seq,
      {{"actor", s.user_id},
       {"operation", r.operation()},
       {"target", r.value},
       {"scope", scope},
       {"patient_id", s.user_id}});
  const auto sc = r.file ? access::RevocationScope::for_file(*r.file) : access::RevocationScope::global();
  auto& ac = *services_.access;
  if (r.target == RevocationRequest::Target::kUser)
    return r.undo ? ac.unrevoke(s, r.value, sc) : ac.revoke(s, r.value, sc);
  return r.undo ? ac.unrevoke_attribute(s, r.value, sc) : ac.revoke_attribute(s, r.value, sc);
}

// --- break-glass ------------------------------------------------------------------------

EmergencyBundle Broker::emergency_retrieve(const std::string& token, const std::string& patient_id,
                                           const FileId& file_id) {
  auto req = begin(token, rk::kEmergency,
                   {{"patient_id", patient_id}, {"file_id", file_id.hex()}});
  const auto& s = req.session;
  auto cred = services_.access->find_user(s.user_id);
  auto meta = file(file_id);

  std::string reason = "none";
  ErrorCode code = ErrorCode::kForbidden;
  if (s.kind != access::UserKind::kHospital) {
    reason = "not-a-hospital";
  } else if (!cred || !cred->attributes.contains(config_.emergency_attribute)) {
    reason = "missing-emergency-attribute";
  } else if (!meta || meta->patient_id != patient_id) {
    reason = "unknown-file";
    code = ErrorCode::kNotFound;
  } else if (!meta->emergency_wrap) {
    reason = "no-emergency-wrap";
    code = ErrorCode::kNotFound;
  }
  const bool allowed = reason == "none";
  const int broker = partition_of(patient_id, config_.broker_count);
  log(broker, Module::kAacm, "emergency_check", req.seq,
      {{"actor", s.user_id},
       {"file_id", file_id.hex()},
       {"patient_id", patient_id},
       {"decision", allowed ? "allow" : "deny"},
       {"reason", reason},
       {"emergency", true}});
  if (!allowed) throw Error(code, "emergency access refused: " + reason);

  log(broker, Module::kMcp, "retrieve_shares", req.seq,
      {{"actor", s.user_id},
       {"file_id", file_id.hex()},
       {"blob_id", meta->blob_id.hex()},
       {"patient_id", patient_id},
       {"emergency", true}});
  abe::EncryptedDocument doc = fetch_document(*meta);
  log(broker, Module::kDmm, "emergency_release", req.seq,
      {{"actor", s.user_id},
       {"file_id", file_id.hex()},
       {"patient_id", patient_id},
       {"emergency", true},
       {"priority", "high"}});
  notices_.add({"", patient_id, notice_kind::kEmergencyAccess, s.user_id, file_id,
                "emergency access to your record by " + (cred ? cred->username : s.user_id), "high",
                0});
  return {file_id, patient_id, abe::rewrap(doc, *meta->emergency_wrap)};
}

// --- read-only views ----------------------------------------------------------------------

Inbox Broker::inbox(const std::string& token) {
  auto req = begin(token, "list_alerts", Json::object());
  const auto& s = req.session;
  Inbox out;
  const std::string recipient = s.kind == access::UserKind::kAdmin ? audit::kAdminRecipient : s.user_id;
  out.alerts = services_.alerts->for_recipient(recipient);
  out.notices = notices_.for_recipient(s.user_id);
  return out;
}

audit::ChainStatus Broker::chain_status(const std::string& token) {
  begin(token, "chain_status", Json::object());
  return services_.brokers_log->verify_chain();
}

// --- client side -------------------------------------------------------------------------

namespace client {

Bytes seal_for_patient(const abe::PublicParams& pp, const std::string& patient_id,
                       ByteView plaintext, RandomSource& rng) {
  return abe::encrypt(pp, abe::PolicyTree::leaf(self_attribute(patient_id)), plaintext, rng)
      .serialize();
}

Bytes open_review_payload(const abe::PublicParams& pp, const abe::UserKey& patient_key,
                          ByteView payload) {
  return abe::decrypt(pp, patient_key, abe::EncryptedDocument::deserialize(payload));
}

ReviewDecision approve(const abe::PublicParams& pp, const std::string& patient_id,
                       const abe::PolicyTree& policy, ByteView plaintext,
                       std::vector<std::string> clouds, int t, bool emergency_wrap,
                       const std::string& emergency_attribute, RandomSource& rng) {
  std::vector<abe::PolicyTree> extra{abe::PolicyTree::leaf(self_attribute(patient_id))};
  if (emergency_wrap) extra.push_back(abe::PolicyTree::leaf(emergency_attribute));
  auto sealed = abe::encrypt_with_wraps(pp, policy, extra, plaintext, rng);
  ReviewDecision d;
  d.approve = true;
  d.policy = policy;
  d.clouds = std::move(clouds);
  d.t = t;
  d.document = std::move(sealed.document);
  d.owner_wrap = sealed.extra_wraps[0];
  if (emergency_wrap) d.emergency_wrap = sealed.extra_wraps[1];
  return d;
}

}  // namespace client

}  // namespace hab::broker
