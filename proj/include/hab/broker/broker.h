#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hab/abe/document.h"
#include "hab/access/access_control.h"
#include "hab/audit/alerts.h"
#include "hab/audit/brokers_log.h"
#include "hab/audit/gatekeeper.h"
#include "hab/broker/aia.h"
#include "hab/broker/kmm.h"
#include "hab/broker/reviews.h"
#include "hab/storage/mcp.h"

namespace hab::broker {

/// Broker partition of a user: first 8 bytes of SHA-256(user_id), big-endian, mod count.
int partition_of(const std::string& user_id, int broker_count);

struct BrokerDescriptor {
  int broker_id = 0;
  int broker_count = 1;
};

struct BrokerConfig {
  int broker_count = 1;
  std::string emergency_attribute = "emergency_room";
};

/// Workflow state of a stored file. The current version's ciphertext lives in the clouds
/// under blob_id; extra key wraps (owner, emergency, re-wrapped header after a policy
/// change) are CP-ABE ciphertexts of the data key and never the key itself.
struct FileMeta {
  FileId file_id;
  std::string patient_id;
  Id128 doc_id;
  int t = 0;
  int n = 0;
  std::vector<std::string> cloud_ids;
  Id128 blob_id;
  std::int64_t created_at_ms = 0;
  std::int64_t updated_at_ms = 0;
  int version = 0;
  std::optional<abe::KeyWrap> owner_wrap;
  std::optional<abe::KeyWrap> emergency_wrap;
  std::optional<abe::KeyWrap> header_override;

  audit::Json to_json() const;
};

struct Registration {
  access::Credential credential;
  abe::UserKey key;
};

/// Patient's answer to a review item. On approval the patient client supplies the
/// ciphertext it produced; the service never sees plaintext.
struct ReviewDecision {
  bool approve = false;
  std::optional<abe::PolicyTree> policy;
  std::vector<std::string> clouds;
  int t = 0;
  std::optional<abe::EncryptedDocument> document;
  std::optional<abe::KeyWrap> owner_wrap;
  std::optional<abe::KeyWrap> emergency_wrap;
};

struct RevocationRequest {
  enum class Target { kUser, kAttribute };
  Target target = Target::kUser;
  std::string value;  // user id or attribute
  std::optional<FileId> file;
  bool undo = false;

  std::string operation() const;
};

struct EmergencyBundle {
  FileId file_id;
  std::string patient_id;
  /// The stored body under the break-glass key wrap.
  abe::EncryptedDocument document;
};

struct Inbox {
  std::vector<audit::Alert> alerts;
  std::vector<Notice> notices;
};

/// Everything a broker acts through. Shared between partitions.
struct BrokerServices {
  std::shared_ptr<store::Database> db;
  std::shared_ptr<access::AccessControl> access;
  std::shared_ptr<KeyManager> keys;
  std::shared_ptr<storage::MultiCloudProxy> mcp;
  std::shared_ptr<audit::Gatekeeper> gatekeeper;
  std::shared_ptr<audit::BrokersLog> brokers_log;
  std::shared_ptr<audit::AlertStore> alerts;
  std::shared_ptr<GrantVerifier> grants;
  /// Consulted when a registration carries no grant (the AIA's direct channel).
  std::shared_ptr<AttributeAuthority> authority;
  const Clock* clock = &system_clock();
  RandomSource* rng = &system_random();
};

/// Data manager and key manager. Every public operation first records the request at the
/// gatekeeper (failing closed), then validates the session, then acts, writing one
/// brokers'-log entry per externally visible action before performing it.
class Broker {
 public:
  Broker(BrokerServices services, BrokerConfig config = {});

  const BrokerConfig& config() const { return config_; }
  const abe::PublicParams& public_params() const { return services_.keys->public_params(); }
  const BrokerServices& services() const { return services_; }
  std::vector<BrokerDescriptor> brokers() const;

  /// A missing grant is requested from the configured authority. Throws kInvalidGrant or
  /// kConflict (username taken).
  Registration register_user(const std::string& username, const std::string& password,
                             const std::optional<AttributeGrant>& grant);
  access::Session login(const std::string& username, const std::string& password);
  void logout(const std::string& token);

  /// Data provider submits a payload sealed for the patient. Throws kForbidden (not a
  /// provider), kNotFound (unknown patient) or kUnknownFile (bad update target).
  ReviewItem submit_upload(const std::string& token, const std::string& patient_id,
                           Bytes payload, std::optional<FileId> target_file = std::nullopt);
  std::vector<ReviewItem> pending_reviews(const std::string& token);
  /// Returns the stored file on approval, nothing on rejection. Split, upload, policy and
  /// metadata form one unit: any failure leaves no visible version and the item pending.
  std::optional<FileMeta> decide(const std::string& token, const std::string& review_id,
                                 const ReviewDecision& decision);

  /// Mediated check, then share retrieval. Throws Error(kAccessDenied) with the deny
  /// reason name as message; a policy denial also files an access request to the patient.
  abe::EncryptedDocument retrieve(const std::string& token, const FileId& file_id);
  Notice request_access(const std::string& token, const FileId& file_id,
                        const std::string& message);
  /// `rewrap` re-wraps the file key under the new policy (produced by the owner's client
  /// from the owner wrap); without it only the mediated policy changes.
  access::PolicyRecord update_policy(const std::string& token, const FileId& file_id,
                                     const abe::PolicyTree& policy,
                                     const std::optional<abe::KeyWrap>& rewrap = std::nullopt);
  access::RevocationState revoke(const std::string& token, const RevocationRequest& request);
  /// Break-glass retrieval. Throws kForbidden for anyone but a hospital holding the
  /// emergency attribute, kNotFound for an unknown file or one without an emergency wrap.
  EmergencyBundle emergency_retrieve(const std::string& token, const std::string& patient_id,
                                     const FileId& file_id);

  /// Intrusion alerts (admins see the admin queue) and notices for the caller.
  Inbox inbox(const std::string& token);
  audit::ChainStatus chain_status(const std::string& token);

  std::optional<FileMeta> file(const FileId& file_id) const;
  std::vector<FileMeta> files_of(const std::string& patient_id) const;
  const ReviewStore& reviews() const { return reviews_; }

  /// Test hook called at named points of the approval path ("after_upload",
  /// "before_commit"); throwing from it simulates a crash there.
  void set_fault_hook(std::function<void(std::string_view)> hook);

 private:
  struct Request {
    access::Session session;
    std::uint64_t seq;
  };
  Request begin(const std::string& token, const char* kind, audit::Json params);
  audit::BrokerLogEntry log(int broker, audit::Module module, const std::string& action,
                            std::uint64_t request, audit::Json params);
  std::mutex& patient_lock(const std::string& patient_id);
  void save_meta(const FileMeta& meta);
  void fault(std::string_view stage);
  abe::EncryptedDocument fetch_document(const FileMeta& meta);

  BrokerServices services_;
  BrokerConfig config_;
  ReviewStore reviews_;
  NoticeStore notices_;

  std::mutex locks_mu_;
  std::map<std::string, std::unique_ptr<std::mutex>> patient_locks_;
  std::mutex hook_mu_;
  std::function<void(std::string_view)> fault_hook_;
};

/// Client-side helpers (what a patient or provider application does locally).
namespace client {

/// Provider seals a review payload so that only the patient's key opens it.
Bytes seal_for_patient(const abe::PublicParams& pp, const std::string& patient_id,
                       ByteView plaintext, RandomSource& rng = system_random());
Bytes open_review_payload(const abe::PublicParams& pp, const abe::UserKey& patient_key,
                          ByteView payload);

/// Patient encrypts an approved payload: main wrap under `policy`, an owner wrap under the
/// patient's own attribute and, unless opted out, a break-glass wrap.
ReviewDecision approve(const abe::PublicParams& pp, const std::string& patient_id,
                       const abe::PolicyTree& policy, ByteView plaintext,
                       std::vector<std::string> clouds, int t, bool emergency_wrap = true,
                       const std::string& emergency_attribute = "emergency_room",
                       RandomSource& rng = system_random());

}  // namespace client

}  // namespace hab::broker
