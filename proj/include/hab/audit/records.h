#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace hab::audit {

using Json = nlohmann::json;

/// One user request as seen at the gatekeeper. `kind` is one of the request kinds below.
struct GatekeeperEntry {
  std::uint64_t seq = 0;
  std::int64_t ts_ms = 0;
  int broker = 0;
  std::string user_id;
  std::string kind;
  Json params = Json::object();

  /// Canonical single-line form (sorted keys, no whitespace).
  std::string to_line() const;
  /// Throws ParseError for anything that is not a well-formed entry.
  static GatekeeperEntry parse(std::string_view line);
  /// `user_id` resolves to the top-level field, anything else to params.
  std::optional<std::string> field(std::string_view name) const;
};

namespace request_kind {
inline constexpr const char* kRegister = "register";
inline constexpr const char* kLogin = "login";
inline constexpr const char* kSubmitUpload = "submit_upload";
inline constexpr const char* kApprove = "approve";
inline constexpr const char* kRetrieve = "retrieve";
inline constexpr const char* kRevoke = "revoke";
inline constexpr const char* kPolicyUpdate = "policy_update";
inline constexpr const char* kEmergency = "emergency";
inline constexpr const char* kAccessRequest = "access_request";
}  // namespace request_kind

/// One broker action. `request` is the gatekeeper sequence number of the user request the
/// action serves. entry_hash = SHA-256(canonical body without entry_hash || prev_hash).
struct BrokerLogEntry {
  std::uint64_t seq = 0;
  std::int64_t ts_ms = 0;
  int broker = 0;
  std::string module;
  std::string action;
  std::uint64_t request = 0;
  Json params = Json::object();
  std::string prev_hash;
  std::string entry_hash;

  std::string kind() const { return module + "." + action; }
  std::string canonical_body() const;
  std::string compute_hash() const;
  std::string to_line() const;
  static BrokerLogEntry parse(std::string_view line);
  /// `actor` and other names resolve into params; `broker`/`request` to the header.
  std::optional<std::string> field(std::string_view name) const;
};

/// prev_hash of the first entry.
const std::string& genesis_hash();

/// Append-only line store backing a log. Implementations throw Error(kAuditFailure) when
/// a write cannot be made durable.
class LogStorage {
 public:
  virtual ~LogStorage() = default;
  virtual void append(const std::string& line) = 0;
  virtual std::vector<std::string> read_lines() const = 0;
  virtual std::optional<std::string> read_head() const = 0;
  virtual void write_head(const std::string& head) = 0;
};

class MemoryLogStorage : public LogStorage {
 public:
  void append(const std::string& line) override;
  std::vector<std::string> read_lines() const override;
  std::optional<std::string> read_head() const override;
  void write_head(const std::string& head) override;

  /// Direct access for tamper experiments.
  void replace_line(std::size_t index, std::string line);
  void truncate(std::size_t count);
  void insert_line(std::size_t index, std::string line);

 private:
  mutable std::mutex mu_;
  std::vector<std::string> lines_;
  std::optional<std::string> head_;
};

/// `<path>` holds newline-delimited records; `<path>.head` the head pointer.
class FileLogStorage : public LogStorage {
 public:
  explicit FileLogStorage(std::filesystem::path path, bool sync = false);

  void append(const std::string& line) override;
  std::vector<std::string> read_lines() const override;
  std::optional<std::string> read_head() const override;
  void write_head(const std::string& head) override;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  bool sync_;
  mutable std::mutex mu_;
};

}  // namespace hab::audit
