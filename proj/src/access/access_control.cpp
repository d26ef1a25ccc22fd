#include "hab/access/access_control.h"

#include "json.hpp"

#include <algorithm>
#include <sstream>

#include "hab/common/error.h"

namespace hab::access {

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS credentials (
  user_id      TEXT PRIMARY KEY,
  username     TEXT NOT NULL UNIQUE,
  salt         BLOB NOT NULL,
  pw_hash      BLOB NOT NULL,
  kind         TEXT NOT NULL,
  attributes   TEXT NOT NULL,
  broker_id    INTEGER NOT NULL,
  failures     INTEGER NOT NULL DEFAULT 0,
  lockouts     INTEGER NOT NULL DEFAULT 0,
  locked_until INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS policies (
  file_id    TEXT NOT NULL,
  revision   INTEGER NOT NULL,
  owner_id   TEXT NOT NULL,
  policy     TEXT NOT NULL,
  created_at INTEGER NOT NULL,
  updated_at INTEGER NOT NULL,
  active     INTEGER NOT NULL,
  PRIMARY KEY (file_id, revision)
);
CREATE INDEX IF NOT EXISTS policies_active ON policies (file_id, active);
CREATE TABLE IF NOT EXISTS revoked_users (
  patient_id TEXT NOT NULL,
  scope      TEXT NOT NULL,
  user_id    TEXT NOT NULL,
  revoked_at INTEGER NOT NULL,
  PRIMARY KEY (patient_id, scope, user_id)
);
CREATE TABLE IF NOT EXISTS revoked_attributes (
  patient_id TEXT NOT NULL,
  scope      TEXT NOT NULL,
  attribute  TEXT NOT NULL,
  revoked_at INTEGER NOT NULL,
  PRIMARY KEY (patient_id, scope, attribute)
);
)sql";

std::string attributes_json(const abe::AttributeSet& attrs) {
  return nlohmann::json(attrs.to_vector()).dump();
}

abe::AttributeSet parse_attributes(const std::string& text) {
  return abe::AttributeSet(nlohmann::json::parse(text).get<std::vector<std::string>>());
}

Credential read_credential(const store::Statement& st) {
  Credential c;
  c.user_id = st.col_text(0);
  c.username = st.col_text(1);
  c.kind = parse_user_kind(st.col_text(2));
  c.attributes = parse_attributes(st.col_text(3));
  c.broker_id = static_cast<int>(st.col_int(4));
  return c;
}

PolicyRecord read_policy(const store::Statement& st) {
  return PolicyRecord{FileId::from_hex(st.col_text(0)), st.col_text(1),
                      abe::parse_policy(st.col_text(2)), st.col_int(3), st.col_int(4),
                      static_cast<int>(st.col_int(5))};
}

constexpr const char* kPolicyColumns =
    "SELECT file_id, owner_id, policy, created_at, updated_at, revision FROM policies ";

}  // namespace

std::string user_kind_name(UserKind kind) {
  switch (kind) {
    case UserKind::kPatient: return "patient";
    case UserKind::kDataProvider: return "data-provider";
    case UserKind::kDataRequestor: return "data-requestor";
    case UserKind::kHospital: return "hospital";
    case UserKind::kAdmin: return "admin";
  }
  return "unknown";
}

UserKind parse_user_kind(std::string_view name) {
  if (name == "patient") return UserKind::kPatient;
  if (name == "data-provider") return UserKind::kDataProvider;
  if (name == "data-requestor") return UserKind::kDataRequestor;
  if (name == "hospital") return UserKind::kHospital;
  if (name == "admin") return UserKind::kAdmin;
  throw Error(ErrorCode::kInvalidArgument, "unknown user kind " + std::string(name));
}

std::string deny_reason_name(DenyReason reason) {
  switch (reason) {
    case DenyReason::kNone: return "none";
    case DenyReason::kGlobalRevocation: return "revoked-global";
    case DenyReason::kFileRevocation: return "revoked-file";
    case DenyReason::kAttributeRevocation: return "revoked-attribute";
    case DenyReason::kPolicyNotSatisfied: return "policy-not-satisfied";
    case DenyReason::kUnknownUser: return "unknown-user";
  }
  return "unknown";
}

AccessControl::AccessControl(std::shared_ptr<store::Database> db, AccessControlConfig config,
                             const Clock& clock, RandomSource& rng)
    : db_(std::move(db)), config_(config), clock_(clock), rng_(rng), dummy_salt_(rng.bytes(16)) {
  if (config_.attempt_limit < 1) throw Error(ErrorCode::kInvalidArgument, "attempt limit must be >= 1");
  db_->exec(kSchema);
}

Bytes AccessControl::hash_password(const std::string& password, ByteView salt) const {
  return crypto::scrypt(password, salt, config_.scrypt);
}

Credential AccessControl::create_credential(const std::string& username, const std::string& password,
                                            UserKind kind, const abe::AttributeSet& attributes,
                                            int broker_id, const std::string& user_id) {
  if (username.empty() || password.empty())
    throw Error(ErrorCode::kInvalidArgument, "username and password are required");
  Bytes salt = rng_.bytes(16);
  Bytes hash = hash_password(password, salt);
  Credential c{user_id, username, kind, attributes, broker_id};
  try {
    store::Statement(*db_,
                     "INSERT INTO credentials (user_id, username, salt, pw_hash, kind, attributes, "
                     "broker_id) VALUES (?, ?, ?, ?, ?, ?, ?)")
        .bind(1, c.user_id)
        .bind(2, c.username)
        .bind(3, salt)
        .bind(4, hash)
        .bind(5, user_kind_name(kind))
        .bind(6, attributes_json(attributes))
        .bind(7, static_cast<std::int64_t>(broker_id))
        .run();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConflict)
      throw Error(ErrorCode::kConflict, "username already registered");
    throw;
  }
  return c;
}

std::optional<Credential> AccessControl::find_user(const std::string& user_id) const {
  store::Statement st(*db_,
                      "SELECT user_id, username, kind, attributes, broker_id FROM credentials "
                      "WHERE user_id = ?");
  st.bind(1, user_id);
  if (!st.step()) return std::nullopt;
  return read_credential(st);
}

std::optional<Credential> AccessControl::find_username(const std::string& username) const {
  store::Statement st(*db_,
                      "SELECT user_id, username, kind, attributes, broker_id FROM credentials "
                      "WHERE username = ?");
  st.bind(1, username);
  if (!st.step()) return std::nullopt;
  return read_credential(st);
}

std::vector<Credential> AccessControl::users() const {
  store::Statement st(*db_,
                      "SELECT user_id, username, kind, attributes, broker_id FROM credentials "
                      "ORDER BY username");
  std::vector<Credential> out;
  while (st.step()) out.push_back(read_credential(st));
  return out;
}

Session AccessControl::authenticate(const std::string& username, const std::string& password) {
  struct Row {
    Credential cred;
    Bytes salt, hash;
    std::int64_t failures, lockouts, locked_until;
  };
  std::optional<Row> row;
  {
    store::Statement st(*db_,
                        "SELECT user_id, username, kind, attributes, broker_id, salt, pw_hash, "
                        "failures, lockouts, locked_until FROM credentials WHERE username = ?");
    st.bind(1, username);
    if (st.step())
      row = Row{read_credential(st), st.col_blob(5), st.col_blob(6), st.col_int(7), st.col_int(8),
                st.col_int(9)};
  }
  if (!row) {
    // Same work as a real check so unknown users are not distinguishable by timing.
    hash_password(password, dummy_salt_);
    throw Error(ErrorCode::kBadCredentials, "invalid username or password");
  }
  const std::int64_t now = clock_.now_ms();
  if (now < row->locked_until) throw Error(ErrorCode::kAccountLocked, "account temporarily locked");

  const Bytes candidate = hash_password(password, row->salt);
  if (!crypto::constant_time_equal(candidate, row->hash)) {
    std::int64_t failures = row->failures + 1;
    std::int64_t lockouts = row->lockouts;
    std::int64_t locked_until = 0;
    if (failures >= config_.attempt_limit) {
      const int shift = static_cast<int>(std::min<std::int64_t>(lockouts, 20));
      locked_until = now + std::min(config_.base_lockout_ms << shift, config_.max_lockout_ms);
      ++lockouts;
      failures = 0;
    }
    store::Statement(*db_,
                     "UPDATE credentials SET failures = ?, lockouts = ?, locked_until = ? "
                     "WHERE user_id = ?")
        .bind(1, failures)
        .bind(2, lockouts)
        .bind(3, locked_until)
        .bind(4, row->cred.user_id)
        .run();
    throw Error(ErrorCode::kBadCredentials, "invalid username or password");
  }
  store::Statement(*db_,
                   "UPDATE credentials SET failures = 0, lockouts = 0, locked_until = 0 "
                   "WHERE user_id = ?")
      .bind(1, row->cred.user_id)
      .run();

  Session s;
  s.token = to_hex(rng_.bytes(32));
  s.user_id = row->cred.user_id;
  s.kind = row->cred.kind;
  s.broker_id = row->cred.broker_id;
  s.issued_at_ms = now;
  s.expires_at_ms = now + config_.session_ttl_ms;
  std::lock_guard lock(sessions_mu_);
  sessions_[s.token] = s;
  return s;
}

Session AccessControl::validate(const std::string& token) const {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(token);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnauthenticated, "unknown session");
  if (clock_.now_ms() >= it->second.expires_at_ms)
    throw Error(ErrorCode::kUnauthenticated, "session expired");
  return it->second;
}

void AccessControl::logout(const std::string& token) {
  std::lock_guard lock(sessions_mu_);
  sessions_.erase(token);
}

PolicyRecord AccessControl::create_policy(const std::string& owner_id, const FileId& file_id,
                                          const abe::PolicyTree& policy) {
  store::Transaction tx(*db_);
  if (this->policy(file_id)) throw Error(ErrorCode::kConflict, "file already has a policy");
  const std::int64_t now = clock_.now_ms();
  PolicyRecord rec{file_id, owner_id, policy, now, now, 1};
  store::Statement(*db_, "INSERT INTO policies VALUES (?, ?, ?, ?, ?, ?, 1)")
      .bind(1, file_id.hex())
      .bind(2, static_cast<std::int64_t>(rec.revision))
      .bind(3, owner_id)
      .bind(4, policy.to_string())
      .bind(5, now)
      .bind(6, now)
      .run();
  tx.commit();
  return rec;
}

PolicyRecord AccessControl::store_policy(const Session& session, const FileId& file_id,
                                         const abe::PolicyTree& policy) {
  store::Transaction tx(*db_);
  auto current = this->policy(file_id);
  if (!current) throw Error(ErrorCode::kUnknownFile, "no such file " + file_id.hex());
  if (current->owner_id != session.user_id)
    throw Error(ErrorCode::kNotOwner, "only the owner may change the policy");
  const std::int64_t now = clock_.now_ms();
  PolicyRecord rec{file_id, current->owner_id, policy, current->created_at_ms, now,
                   current->revision + 1};
  store::Statement(*db_, "UPDATE policies SET active = 0 WHERE file_id = ? AND active = 1")
      .bind(1, file_id.hex())
      .run();
  store::Statement(*db_, "INSERT INTO policies VALUES (?, ?, ?, ?, ?, ?, 1)")
      .bind(1, file_id.hex())
      .bind(2, static_cast<std::int64_t>(rec.revision))
      .bind(3, rec.owner_id)
      .bind(4, policy.to_string())
      .bind(5, rec.created_at_ms)
      .bind(6, now)
      .run();
  tx.commit();
  return rec;
}

std::optional<PolicyRecord> AccessControl::policy(const FileId& file_id) const {
  store::Statement st(*db_, std::string(kPolicyColumns) + "WHERE file_id = ? AND active = 1");
  st.bind(1, file_id.hex());
  if (!st.step()) return std::nullopt;
  return read_policy(st);
}

std::vector<PolicyRecord> AccessControl::policy_history(const FileId& file_id) const {
  store::Statement st(*db_, std::string(kPolicyColumns) + "WHERE file_id = ? ORDER BY revision");
  st.bind(1, file_id.hex());
  std::vector<PolicyRecord> out;
  while (st.step()) out.push_back(read_policy(st));
  return out;
}

std::string AccessControl::export_policy_history() const {
  store::Statement st(*db_, std::string(kPolicyColumns) + "ORDER BY file_id, revision");
  std::ostringstream out;
  while (st.step()) {
    PolicyRecord rec = read_policy(st);
    nlohmann::json j{{"file_id", rec.file_id.hex()}, {"owner_id", rec.owner_id},
                     {"policy", rec.policy.to_string()}, {"revision", rec.revision},
                     {"updated_at_ms", rec.updated_at_ms}};
    out << j.dump() << '\n';
  }
  return out.str();
}

std::vector<FileId> AccessControl::files_of(const std::string& owner_id) const {
  store::Statement st(*db_,
                      "SELECT file_id FROM policies WHERE owner_id = ? AND active = 1 ORDER BY file_id");
  st.bind(1, owner_id);
  std::vector<FileId> out;
  while (st.step()) out.push_back(FileId::from_hex(st.col_text(0)));
  return out;
}

AccessDecision AccessControl::check_access(const std::string& requestor_id,
                                           const FileId& file_id) const {
  auto rec = policy(file_id);
  if (!rec) throw Error(ErrorCode::kUnknownFile, "no such file " + file_id.hex());
  if (requestor_id == rec->owner_id) return AccessDecision::allow();
  auto requestor = find_user(requestor_id);
  if (!requestor) return AccessDecision::deny(DenyReason::kUnknownUser);

  auto revoked_user = [&](const std::string& scope) {
    store::Statement st(*db_,
                        "SELECT 1 FROM revoked_users WHERE patient_id = ? AND scope = ? AND user_id = ?");
    st.bind(1, rec->owner_id).bind(2, scope).bind(3, requestor_id);
    return st.step();
  };
  if (revoked_user("*")) return AccessDecision::deny(DenyReason::kGlobalRevocation);
  if (revoked_user(file_id.hex())) return AccessDecision::deny(DenyReason::kFileRevocation);
  {
    store::Statement st(*db_,
                        "SELECT attribute FROM revoked_attributes WHERE patient_id = ? AND scope IN ('*', ?)");
    st.bind(1, rec->owner_id).bind(2, file_id.hex());
    while (st.step())
      if (requestor->attributes.contains(st.col_text(0)))
        return AccessDecision::deny(DenyReason::kAttributeRevocation);
  }
  if (!abe::satisfies(rec->policy, requestor->attributes))
    return AccessDecision::deny(DenyReason::kPolicyNotSatisfied);
  return AccessDecision::allow();
}

void AccessControl::require_scope_owner(const Session& session, const RevocationScope& scope) const {
  if (scope.is_global()) {
    if (session.kind != UserKind::kPatient)
      throw Error(ErrorCode::kNotOwner, "only patients manage a patient-wide deny list");
    return;
  }
  auto rec = policy(*scope.file);
  if (!rec) throw Error(ErrorCode::kUnknownFile, "no such file " + scope.file->hex());
  if (rec->owner_id != session.user_id)
    throw Error(ErrorCode::kNotOwner, "only the owner may revoke access to this file");
}

RevocationState AccessControl::revoke(const Session& session, const std::string& target_user,
                                      const RevocationScope& scope) {
  require_scope_owner(session, scope);
  store::Statement(*db_, "INSERT OR IGNORE INTO revoked_users VALUES (?, ?, ?, ?)")
      .bind(1, session.user_id)
      .bind(2, scope.key())
      .bind(3, target_user)
      .bind(4, clock_.now_ms())
      .run();
  return revocation_state(session.user_id, scope);
}

RevocationState AccessControl::unrevoke(const Session& session, const std::string& target_user,
                                        const RevocationScope& scope) {
  require_scope_owner(session, scope);
  store::Statement(*db_, "DELETE FROM revoked_users WHERE patient_id = ? AND scope = ? AND user_id = ?")
      .bind(1, session.user_id)
      .bind(2, scope.key())
      .bind(3, target_user)
      .run();
  return revocation_state(session.user_id, scope);
}

RevocationState AccessControl::revoke_attribute(const Session& session, const std::string& attribute,
                                                const RevocationScope& scope) {
  require_scope_owner(session, scope);
  store::Statement(*db_, "INSERT OR IGNORE INTO revoked_attributes VALUES (?, ?, ?, ?)")
      .bind(1, session.user_id)
      .bind(2, scope.key())
      .bind(3, abe::normalize_attribute(attribute))
      .bind(4, clock_.now_ms())
      .run();
  return revocation_state(session.user_id, scope);
}

RevocationState AccessControl::unrevoke_attribute(const Session& session,
                                                  const std::string& attribute,
                                                  const RevocationScope& scope) {
  require_scope_owner(session, scope);
  store::Statement(*db_,
                   "DELETE FROM revoked_attributes WHERE patient_id = ? AND scope = ? AND attribute = ?")
      .bind(1, session.user_id)
      .bind(2, scope.key())
      .bind(3, abe::normalize_attribute(attribute))
      .run();
  return revocation_state(session.user_id, scope);
}

RevocationState AccessControl::revocation_state(const std::string& patient_id,
                                                const RevocationScope& scope) const {
  RevocationState state{patient_id, scope, {}, {}};
  {
    store::Statement st(*db_, "SELECT user_id FROM revoked_users WHERE patient_id = ? AND scope = ?");
    st.bind(1, patient_id).bind(2, scope.key());
    while (st.step()) state.users.insert(st.col_text(0));
  }
  {
    store::Statement st(*db_,
                        "SELECT attribute FROM revoked_attributes WHERE patient_id = ? AND scope = ?");
    st.bind(1, patient_id).bind(2, scope.key());
    while (st.step()) state.attributes.insert(st.col_text(0));
  }
  return state;
}

}  // namespace hab::access
