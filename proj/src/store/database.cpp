#include "hab/store/database.h"

#include "hab/common/error.h"

namespace hab::store {

std::shared_ptr<Database> Database::open(const std::string& path) {
  sqlite3* db = nullptr;
  const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.c_str(), &db, flags, nullptr) != SQLITE_OK) {
    std::string msg = db ? sqlite3_errmsg(db) : "out of memory";
    sqlite3_close(db);
    throw Error(ErrorCode::kStorageFailure, "cannot open database " + path + ": " + msg);
  }
  std::shared_ptr<Database> out(new Database(db, path));
  out->exec("PRAGMA foreign_keys = ON");
  if (path != ":memory:") {
    out->exec("PRAGMA journal_mode = WAL");
    out->exec("PRAGMA synchronous = NORMAL");
  }
  return out;
}

Database::~Database() { sqlite3_close(db_); }

void Database::fail(const std::string& what) const {
  throw Error(ErrorCode::kStorageFailure, what + ": " + sqlite3_errmsg(db_));
}

void Database::exec(std::string_view sql) {
  std::lock_guard lock(mu_);
  char* err = nullptr;
  if (sqlite3_exec(db_, std::string(sql).c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw Error(ErrorCode::kStorageFailure, "sql error: " + msg);
  }
}

std::vector<std::string> Database::tables() {
  std::vector<std::string> out;
  Statement st(*this, "SELECT name FROM sqlite_master WHERE type = 'table' ORDER BY name");
  while (st.step()) out.push_back(st.col_text(0));
  return out;
}

Statement::Statement(Database& db, std::string_view sql) : db_(db), lock_(db.mu_) {
  if (sqlite3_prepare_v2(db_.db_, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) !=
      SQLITE_OK)
    db_.fail("prepare '" + std::string(sql) + "'");
}

Statement::~Statement() { sqlite3_finalize(stmt_); }

Statement& Statement::bind(int idx, std::int64_t v) {
  if (sqlite3_bind_int64(stmt_, idx, v) != SQLITE_OK) db_.fail("bind");
  return *this;
}

Statement& Statement::bind(int idx, std::string_view v) {
  if (sqlite3_bind_text(stmt_, idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT) !=
      SQLITE_OK)
    db_.fail("bind");
  return *this;
}

Statement& Statement::bind(int idx, ByteView v) {
  if (sqlite3_bind_blob(stmt_, idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT) !=
      SQLITE_OK)
    db_.fail("bind");
  return *this;
}

Statement& Statement::bind_null(int idx) {
  if (sqlite3_bind_null(stmt_, idx) != SQLITE_OK) db_.fail("bind");
  return *this;
}

bool Statement::step() {
  int rc = sqlite3_step(stmt_);
  if (rc == SQLITE_ROW) return true;
  if (rc == SQLITE_DONE) return false;
  if (rc == SQLITE_CONSTRAINT)
    throw Error(ErrorCode::kConflict, std::string("constraint violation: ") + sqlite3_errmsg(db_.db_));
  db_.fail("step");
}

int Statement::run() {
  while (step()) {
  }
  return sqlite3_changes(db_.db_);
}

std::int64_t Statement::col_int(int idx) const { return sqlite3_column_int64(stmt_, idx); }

std::string Statement::col_text(int idx) const {
  const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, idx));
  return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, idx))) : std::string();
}

Bytes Statement::col_blob(int idx) const {
  const auto* p = static_cast<const std::uint8_t*>(sqlite3_column_blob(stmt_, idx));
  const int n = sqlite3_column_bytes(stmt_, idx);
  return p ? Bytes(p, p + n) : Bytes();
}

bool Statement::col_null(int idx) const { return sqlite3_column_type(stmt_, idx) == SQLITE_NULL; }

Transaction::Transaction(Database& db) : db_(db), lock_(db.mu_) {
  if (db_.tx_depth_ == 0) {
    db_.exec("BEGIN IMMEDIATE");
  } else {
    savepoint_ = "sp" + std::to_string(db_.tx_depth_);
    db_.exec("SAVEPOINT " + savepoint_);
  }
  ++db_.tx_depth_;
}

Transaction::~Transaction() {
  if (done_) return;
  --db_.tx_depth_;
  try {
    if (savepoint_.empty()) {
      db_.exec("ROLLBACK");
    } else {
      db_.exec("ROLLBACK TO " + savepoint_);
      db_.exec("RELEASE " + savepoint_);
    }
  } catch (...) {
  }
}

void Transaction::commit() {
  if (done_) return;
  if (savepoint_.empty()) {
    db_.exec("COMMIT");
  } else {
    db_.exec("RELEASE " + savepoint_);
  }
  done_ = true;
  --db_.tx_depth_;
}

}  // namespace hab::store
