#include "hab/audit/alerts.h"

#include "hab/common/bytes.h"
#include "hab/common/crypto.h"

namespace hab::audit {

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS alerts (
  dedup_key   TEXT PRIMARY KEY,
  alert_id    TEXT NOT NULL UNIQUE,
  rule_id     TEXT NOT NULL,
  category    TEXT NOT NULL,
  bl_seq      INTEGER,
  gk_seq      INTEGER,
  description TEXT NOT NULL,
  severity    TEXT NOT NULL,
  recipients  TEXT NOT NULL,
  raised_at   INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS alert_queue (
  recipient    TEXT NOT NULL,
  alert_id     TEXT NOT NULL,
  acknowledged INTEGER NOT NULL DEFAULT 0,
  PRIMARY KEY (recipient, alert_id)
);
)sql";

constexpr const char* kColumns =
    "SELECT a.alert_id, a.rule_id, a.category, a.bl_seq, a.gk_seq, a.description, a.severity, "
    "a.recipients, a.raised_at FROM alerts a ";

Alert read_alert(const store::Statement& st) {
  Alert a;
  a.alert_id = st.col_text(0);
  a.rule_id = st.col_text(1);
  a.category = st.col_text(2);
  if (!st.col_null(3)) a.bl_seq = static_cast<std::uint64_t>(st.col_int(3));
  if (!st.col_null(4)) a.gk_seq = static_cast<std::uint64_t>(st.col_int(4));
  a.description = st.col_text(5);
  a.severity = st.col_text(6);
  a.recipients = Json::parse(st.col_text(7)).get<std::vector<std::string>>();
  a.raised_at_ms = st.col_int(8);
  return a;
}

}  // namespace

std::string Alert::dedup_key() const {
  std::string key = rule_id + "|";
  if (bl_seq) key += "bl:" + std::to_string(*bl_seq);
  else if (gk_seq) key += "gk:" + std::to_string(*gk_seq);
  else key += "-";
  return key;
}

Json Alert::to_json() const {
  Json j{{"alert_id", alert_id},   {"rule_id", rule_id},     {"category", category},
         {"description", description}, {"severity", severity}, {"recipients", recipients},
         {"raised_at_ms", raised_at_ms}};
  j["bl_seq"] = bl_seq ? Json(*bl_seq) : Json(nullptr);
  j["gk_seq"] = gk_seq ? Json(*gk_seq) : Json(nullptr);
  return j;
}

AlertStore::AlertStore(std::shared_ptr<store::Database> db, const Clock& clock)
    : db_(std::move(db)), clock_(clock) {
  db_->exec(kSchema);
}

bool AlertStore::deliver(Alert alert) {
  const std::string key = alert.dedup_key();
  if (alert.alert_id.empty()) alert.alert_id = "al-" + to_hex(sha256(key)).substr(0, 20);
  if (alert.raised_at_ms == 0) alert.raised_at_ms = clock_.now_ms();
  if (alert.recipients.empty()) alert.recipients.push_back(kAdminRecipient);

  store::Transaction tx(*db_);
  {
    store::Statement st(*db_, "SELECT 1 FROM alerts WHERE dedup_key = ?");
    st.bind(1, key);
    if (st.step()) return false;
  }
  store::Statement ins(*db_, "INSERT INTO alerts VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)");
  ins.bind(1, key).bind(2, alert.alert_id).bind(3, alert.rule_id).bind(4, alert.category);
  if (alert.bl_seq) ins.bind(5, static_cast<std::int64_t>(*alert.bl_seq));
  else ins.bind_null(5);
  if (alert.gk_seq) ins.bind(6, static_cast<std::int64_t>(*alert.gk_seq));
  else ins.bind_null(6);
  ins.bind(7, alert.description).bind(8, alert.severity).bind(9, Json(alert.recipients).dump())
      .bind(10, alert.raised_at_ms);
  ins.run();
  for (const auto& r : alert.recipients) {
    store::Statement(*db_, "INSERT OR IGNORE INTO alert_queue (recipient, alert_id) VALUES (?, ?)")
        .bind(1, r)
        .bind(2, alert.alert_id)
        .run();
  }
  tx.commit();
  return true;
}

std::vector<Alert> AlertStore::all() const {
  store::Statement st(*db_, std::string(kColumns) + "ORDER BY a.raised_at, a.alert_id");
  std::vector<Alert> out;
  while (st.step()) out.push_back(read_alert(st));
  return out;
}

std::vector<Alert> AlertStore::for_recipient(const std::string& recipient,
                                             bool include_acknowledged) const {
  std::string sql = std::string(kColumns) +
                    "JOIN alert_queue q ON q.alert_id = a.alert_id WHERE q.recipient = ? ";
  if (!include_acknowledged) sql += "AND q.acknowledged = 0 ";
  sql += "ORDER BY a.raised_at, a.alert_id";
  store::Statement st(*db_, sql);
  st.bind(1, recipient);
  std::vector<Alert> out;
  while (st.step()) out.push_back(read_alert(st));
  return out;
}

void AlertStore::acknowledge(const std::string& recipient, const std::string& alert_id) {
  store::Statement(*db_,
                   "UPDATE alert_queue SET acknowledged = 1 WHERE recipient = ? AND alert_id = ?")
      .bind(1, recipient)
      .bind(2, alert_id)
      .run();
}

std::size_t AlertStore::count() const {
  store::Statement st(*db_, "SELECT COUNT(*) FROM alerts");
  st.step();
  return static_cast<std::size_t>(st.col_int(0));
}

}  // namespace hab::audit
