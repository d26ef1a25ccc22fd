#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hab/audit/records.h"
#include "hab/common/bytes.h"
#include "hab/common/clock.h"
#include "hab/store/database.h"

namespace hab::broker {

enum class ReviewStatus { kPending, kApproved, kRejected };
std::string review_status_name(ReviewStatus s);

/// Data-provider submission awaiting the patient's decision. The payload is opaque to
/// the service (sealed by the provider for the patient) and is dropped once decided.
struct ReviewItem {
  std::string review_id;
  std::string provider_id;
  std::string patient_id;
  Bytes payload;
  ReviewStatus status = ReviewStatus::kPending;
  std::int64_t submitted_at_ms = 0;
  std::optional<std::int64_t> decided_at_ms;
  std::optional<FileId> target_file;

  audit::Json to_json(bool with_payload) const;
};

class ReviewStore {
 public:
  ReviewStore(std::shared_ptr<store::Database> db, const Clock& clock);

  ReviewItem create(const std::string& provider_id, const std::string& patient_id, Bytes payload,
                    std::optional<FileId> target_file, const std::string& review_id);
  std::optional<ReviewItem> get(const std::string& review_id) const;
  std::vector<ReviewItem> pending_for(const std::string& patient_id) const;
  std::size_t count() const;

  /// pending -> approved/rejected, exactly once and only by the patient.
  /// Throws kNotFound, kNotOwner or kConflict (already decided).
  ReviewItem decide(const std::string& review_id, const std::string& patient_id, bool approve);

 private:
  std::shared_ptr<store::Database> db_;
  const Clock& clock_;
};

/// Patient-facing notification that is not an intrusion alert: access requests from
/// denied requestors and break-glass accesses.
struct Notice {
  std::string notice_id;
  std::string recipient;
  std::string kind;
  std::string from_user;
  std::optional<FileId> file_id;
  std::string message;
  std::string priority = "normal";
  std::int64_t created_at_ms = 0;

  audit::Json to_json() const;
};

namespace notice_kind {
inline constexpr const char* kAccessRequest = "access-request";
inline constexpr const char* kEmergencyAccess = "emergency-access";
}  // namespace notice_kind

class NoticeStore {
 public:
  NoticeStore(std::shared_ptr<store::Database> db, const Clock& clock);

  Notice add(Notice n);
  std::vector<Notice> for_recipient(const std::string& recipient) const;

 private:
  std::shared_ptr<store::Database> db_;
  const Clock& clock_;
};

}  // namespace hab::broker
