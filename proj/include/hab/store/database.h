#pragma once

#include <sqlite3.h>

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hab/common/bytes.h"

namespace hab::store {

class Database;

/// Prepared statement. Bind indices are 1-based; column indices 0-based.
class Statement {
 public:
  Statement(Database& db, std::string_view sql);
  ~Statement();
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int idx, std::int64_t v);
  Statement& bind(int idx, std::string_view v);
  Statement& bind(int idx, const char* v) { return bind(idx, std::string_view(v)); }
  Statement& bind(int idx, const std::string& v) { return bind(idx, std::string_view(v)); }
  Statement& bind(int idx, ByteView v);
  Statement& bind(int idx, const Bytes& v) { return bind(idx, ByteView(v)); }
  Statement& bind_null(int idx);

  /// True while a row is available.
  bool step();
  /// Runs to completion; returns sqlite3_changes().
  int run();

  std::int64_t col_int(int idx) const;
  std::string col_text(int idx) const;
  Bytes col_blob(int idx) const;
  bool col_null(int idx) const;

 private:
  Database& db_;
  sqlite3_stmt* stmt_ = nullptr;
  std::unique_lock<std::recursive_mutex> lock_;
};

/// Transaction scope; commits on commit(), rolls back on destruction otherwise.
/// Nested scopes become savepoints.
class Transaction {
 public:
  explicit Transaction(Database& db);
  ~Transaction();
  Transaction(const Transaction&) = delete;
  Transaction& operator=(const Transaction&) = delete;

  void commit();

 private:
  Database& db_;
  std::unique_lock<std::recursive_mutex> lock_;
  std::string savepoint_;
  bool done_ = false;
};

/// Single SQLite connection shared by all stores; access is serialized by a recursive
/// mutex held for the life of each Statement and Transaction.
class Database {
 public:
  /// ":memory:" opens a private in-memory database.
  static std::shared_ptr<Database> open(const std::string& path);
  ~Database();
  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;

  void exec(std::string_view sql);
  const std::string& path() const { return path_; }

  /// Every table name in the schema, for audits of persistent state.
  std::vector<std::string> tables();

 private:
  friend class Statement;
  friend class Transaction;
  Database(sqlite3* db, std::string path) : db_(db), path_(std::move(path)) {}
  [[noreturn]] void fail(const std::string& what) const;

  sqlite3* db_;
  std::string path_;
  std::recursive_mutex mu_;
  int tx_depth_ = 0;
};

}  // namespace hab::store
