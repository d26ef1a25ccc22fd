#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hab/abe/policy.h"
#include "hab/common/clock.h"
#include "hab/common/crypto.h"
#include "hab/common/random.h"
#include "hab/store/database.h"

namespace hab::access {

enum class UserKind { kPatient, kDataProvider, kDataRequestor, kHospital, kAdmin };

std::string user_kind_name(UserKind kind);
UserKind parse_user_kind(std::string_view name);

/// Public view of a credential; the password hash never leaves the store.
struct Credential {
  std::string user_id;
  std::string username;
  UserKind kind = UserKind::kDataRequestor;
  abe::AttributeSet attributes;
  int broker_id = 0;
};

struct Session {
  std::string token;
  std::string user_id;
  UserKind kind = UserKind::kDataRequestor;
  int broker_id = 0;
  std::int64_t issued_at_ms = 0;
  std::int64_t expires_at_ms = 0;
};

struct PolicyRecord {
  FileId file_id;
  std::string owner_id;
  abe::PolicyTree policy;
  std::int64_t created_at_ms = 0;
  std::int64_t updated_at_ms = 0;
  int revision = 0;
};

enum class DenyReason {
  kNone,
  kGlobalRevocation,
  kFileRevocation,
  kAttributeRevocation,
  kPolicyNotSatisfied,
  kUnknownUser,
};

std::string deny_reason_name(DenyReason reason);

struct AccessDecision {
  bool allowed = false;
  DenyReason reason = DenyReason::kNone;

  static AccessDecision allow() { return {true, DenyReason::kNone}; }
  static AccessDecision deny(DenyReason r) { return {false, r}; }
};

/// Either one file of the patient or every file of the patient.
struct RevocationScope {
  std::optional<FileId> file;

  static RevocationScope global() { return {}; }
  static RevocationScope for_file(const FileId& f) { return {f}; }
  bool is_global() const { return !file.has_value(); }
  std::string key() const { return file ? file->hex() : "*"; }
};

struct RevocationState {
  std::string patient_id;
  RevocationScope scope;
  std::set<std::string> users;
  std::set<std::string> attributes;
};

struct AccessControlConfig {
  int attempt_limit = 5;
  std::int64_t base_lockout_ms = 30'000;
  std::int64_t max_lockout_ms = 24LL * 3600 * 1000;
  std::int64_t session_ttl_ms = 3600'000;
  crypto::ScryptCost scrypt;
};

/// Authentication, policy storage and the mediated revocation check that gates every
/// retrieval. Revocation never touches ciphertexts or keys; it is a lookup performed
/// before storage is consulted.
class AccessControl {
 public:
  AccessControl(std::shared_ptr<store::Database> db, AccessControlConfig config = {},
                const Clock& clock = system_clock(), RandomSource& rng = system_random());

  const AccessControlConfig& config() const { return config_; }

  /// Throws kConflict for a duplicate username.
  Credential create_credential(const std::string& username, const std::string& password,
                               UserKind kind, const abe::AttributeSet& attributes, int broker_id,
                               const std::string& user_id);
  std::optional<Credential> find_user(const std::string& user_id) const;
  std::optional<Credential> find_username(const std::string& username) const;
  std::vector<Credential> users() const;

  /// Throws kBadCredentials (also for unknown users) or kAccountLocked.
  Session authenticate(const std::string& username, const std::string& password);
  /// Throws kUnauthenticated for unknown or expired tokens.
  Session validate(const std::string& token) const;
  void logout(const std::string& token);

  /// Initial policy of a new file (approval path). Throws kConflict if one exists.
  PolicyRecord create_policy(const std::string& owner_id, const FileId& file_id,
                             const abe::PolicyTree& policy);
  /// Replaces the active policy; the previous one stays in the history.
  /// Throws kUnknownFile or kNotOwner.
  PolicyRecord store_policy(const Session& session, const FileId& file_id,
                            const abe::PolicyTree& policy);
  std::optional<PolicyRecord> policy(const FileId& file_id) const;
  std::vector<PolicyRecord> policy_history(const FileId& file_id) const;
  /// Newline-delimited JSON records of every policy revision.
  std::string export_policy_history() const;
  std::vector<FileId> files_of(const std::string& owner_id) const;

  /// The owner is always allowed. Others: patient-wide deny set, file revocation set, revoked attributes, then policy
  /// satisfaction. Throws kUnknownFile when the file has no policy.
  AccessDecision check_access(const std::string& requestor_id, const FileId& file_id) const;

  RevocationState revoke(const Session& session, const std::string& target_user,
                         const RevocationScope& scope);
  RevocationState unrevoke(const Session& session, const std::string& target_user,
                           const RevocationScope& scope);
  RevocationState revoke_attribute(const Session& session, const std::string& attribute,
                                   const RevocationScope& scope);
  RevocationState unrevoke_attribute(const Session& session, const std::string& attribute,
                                     const RevocationScope& scope);
  RevocationState revocation_state(const std::string& patient_id,
                                   const RevocationScope& scope) const;

 private:
  void require_scope_owner(const Session& session, const RevocationScope& scope) const;
  Bytes hash_password(const std::string& password, ByteView salt) const;

  std::shared_ptr<store::Database> db_;
  AccessControlConfig config_;
  const Clock& clock_;
  RandomSource& rng_;
  Bytes dummy_salt_;

  mutable std::mutex sessions_mu_;
  std::map<std::string, Session> sessions_;
};

}  // namespace hab::access
