#include "hab/broker/reviews.h"

#include "hab/common/error.h"

namespace hab::broker {

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS reviews (
  review_id    TEXT PRIMARY KEY,
  provider_id  TEXT NOT NULL,
  patient_id   TEXT NOT NULL,
  payload      BLOB,
  status       TEXT NOT NULL,
  submitted_at INTEGER NOT NULL,
  decided_at   INTEGER,
  target_file  TEXT
);
CREATE INDEX IF NOT EXISTS reviews_patient ON reviews (patient_id, status);
CREATE TABLE IF NOT EXISTS notices (
  notice_id  TEXT PRIMARY KEY,
  recipient  TEXT NOT NULL,
  kind       TEXT NOT NULL,
  from_user  TEXT NOT NULL,
  file_id    TEXT,
  message    TEXT NOT NULL,
  priority   TEXT NOT NULL,
  created_at INTEGER NOT NULL
);
)sql";

constexpr const char* kReviewColumns =
    "SELECT review_id, provider_id, patient_id, payload, status, submitted_at, decided_at, "
    "target_file FROM reviews ";

ReviewStatus parse_status(const std::string& s) {
  if (s == "pending") return ReviewStatus::kPending;
  if (s == "approved") return ReviewStatus::kApproved;
  if (s == "rejected") return ReviewStatus::kRejected;
  throw Error(ErrorCode::kMalformed, "unknown review status " + s);
}

ReviewItem read_review(const store::Statement& st) {
  ReviewItem r;
  r.review_id = st.col_text(0);
  r.provider_id = st.col_text(1);
  r.patient_id = st.col_text(2);
  if (!st.col_null(3)) r.payload = st.col_blob(3);
  r.status = parse_status(st.col_text(4));
  r.submitted_at_ms = st.col_int(5);
  if (!st.col_null(6)) r.decided_at_ms = st.col_int(6);
  if (!st.col_null(7)) r.target_file = FileId::from_hex(st.col_text(7));
  return r;
}

}  // namespace

std::string review_status_name(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::kPending: return "pending";
    case ReviewStatus::kApproved: return "approved";
    case ReviewStatus::kRejected: return "rejected";
  }
  return "unknown";
}

audit::Json ReviewItem::to_json(bool with_payload) const {
  audit::Json j{{"review_id", review_id},
                {"provider_id", provider_id},
                {"patient_id", patient_id},
                {"status", review_status_name(status)},
                {"submitted_at_ms", submitted_at_ms}};
  j["decided_at_ms"] = decided_at_ms ? audit::Json(*decided_at_ms) : audit::Json(nullptr);
  j["target_file_id"] = target_file ? audit::Json(target_file->hex()) : audit::Json(nullptr);
  if (with_payload) j["payload"] = base64_encode(payload);
  return j;
}

ReviewStore::ReviewStore(std::shared_ptr<store::Database> db, const Clock& clock)
    : db_(std::move(db)), clock_(clock) {
  db_->exec(kSchema);
}

ReviewItem ReviewStore::create(const std::string& provider_id, const std::string& patient_id,
                               Bytes payload, std::optional<FileId> target_file,
                               const std::string& review_id) {
  ReviewItem r;
  r.review_id = review_id;
  r.provider_id = provider_id;
  r.patient_id = patient_id;
  r.payload = std::move(payload);
  r.submitted_at_ms = clock_.now_ms();
  r.target_file = target_file;
  store::Statement st(*db_,
                      "INSERT INTO reviews (review_id, provider_id, patient_id, payload, status, "
                      "submitted_at, target_file) VALUES (?, ?, ?, ?, 'pending', ?, ?)");
  st.bind(1, r.review_id).bind(2, provider_id).bind(3, patient_id).bind(4, r.payload)
      .bind(5, r.submitted_at_ms);
  if (target_file) st.bind(6, target_file->hex());
  else st.bind_null(6);
  st.run();
  return r;
}

std::optional<ReviewItem> ReviewStore::get(const std::string& review_id) const {
  store::Statement st(*db_, std::string(kReviewColumns) + "WHERE review_id = ?");
  st.bind(1, review_id);
  if (!st.step()) return std::nullopt;
  return read_review(st);
}

std::vector<ReviewItem> ReviewStore::pending_for(const std::string& patient_id) const {
  store::Statement st(*db_, std::string(kReviewColumns) +
                                "WHERE patient_id = ? AND status = 'pending' ORDER BY submitted_at, review_id");
  st.bind(1, patient_id);
  std::vector<ReviewItem> out;
  while (st.step()) out.push_back(read_review(st));
  return out;
}

std::size_t ReviewStore::count() const {
  store::Statement st(*db_, "SELECT COUNT(*) FROM reviews");
  st.step();
  return static_cast<std::size_t>(st.col_int(0));
}

ReviewItem ReviewStore::decide(const std::string& review_id, const std::string& patient_id,
                               bool approve) {
  store::Transaction tx(*db_);
  auto item = get(review_id);
  if (!item) throw Error(ErrorCode::kNotFound, "no such review " + review_id);
  if (item->patient_id != patient_id)
    throw Error(ErrorCode::kNotOwner, "review belongs to another patient");
  if (item->status != ReviewStatus::kPending)
    throw Error(ErrorCode::kConflict, "review already " + review_status_name(item->status));
  item->status = approve ? ReviewStatus::kApproved : ReviewStatus::kRejected;
  item->decided_at_ms = clock_.now_ms();
  store::Statement(*db_,
                   "UPDATE reviews SET status = ?, decided_at = ?, payload = NULL "
                   "WHERE review_id = ? AND status = 'pending'")
      .bind(1, review_status_name(item->status))
      .bind(2, *item->decided_at_ms)
      .bind(3, review_id)
      .run();
  tx.commit();
  return *item;
}

audit::Json Notice::to_json() const {
  audit::Json j{{"notice_id", notice_id}, {"recipient", recipient}, {"kind", kind},
                {"from_user", from_user}, {"message", message},     {"priority", priority},
                {"created_at_ms", created_at_ms}};
  j["file_id"] = file_id ? audit::Json(file_id->hex()) : audit::Json(nullptr);
  return j;
}

NoticeStore::NoticeStore(std::shared_ptr<store::Database> db, const Clock& clock)
    : db_(std::move(db)), clock_(clock) {
  db_->exec(kSchema);
}

Notice NoticeStore::add(Notice n) {
  if (n.notice_id.empty()) n.notice_id = Id128::random().hex();
  if (n.created_at_ms == 0) n.created_at_ms = clock_.now_ms();
  store::Statement st(*db_, "INSERT INTO notices VALUES (?, ?, ?, ?, ?, ?, ?, ?)");
  st.bind(1, n.notice_id).bind(2, n.recipient).bind(3, n.kind).bind(4, n.from_user);
  if (n.file_id) st.bind(5, n.file_id->hex());
  else st.bind_null(5);
  st.bind(6, n.message).bind(7, n.priority).bind(8, n.created_at_ms);
  st.run();
  return n;
}

std::vector<Notice> NoticeStore::for_recipient(const std::string& recipient) const {
  store::Statement st(*db_,
                      "SELECT notice_id, recipient, kind, from_user, file_id, message, priority, "
                      "created_at FROM notices WHERE recipient = ? ORDER BY created_at, notice_id");
  st.bind(1, recipient);
  std::vector<Notice> out;
  while (st.step()) {
    Notice n;
    n.notice_id = st.col_text(0);
    n.recipient = st.col_text(1);
    n.kind = st.col_text(2);
    n.from_user = st.col_text(3);
    if (!st.col_null(4)) n.file_id = FileId::from_hex(st.col_text(4));
    n.message = st.col_text(5);
    n.priority = st.col_text(6);
    n.created_at_ms = st.col_int(7);
    out.push_back(std::move(n));
  }
  return out;
}

}  // namespace hab::broker
