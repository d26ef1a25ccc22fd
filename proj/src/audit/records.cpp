#include "hab/audit/records.h"

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hab/common/bytes.h"
#include "hab/common/crypto.h"
#include "hab/common/error.h"

namespace hab::audit {

namespace {

Json parse_object(std::string_view line) {
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kMalformed, "log line is not a JSON object");
  return j;
}

template <typename T>
T take(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::kMalformed, std::string("log entry lacks ") + key);
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::kMalformed, std::string("log entry field ") + key + " has the wrong type");
  }
}

std::optional<std::string> param_field(const Json& params, std::string_view name) {
  auto it = params.find(name);
  if (it == params.end()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  return it->dump();
}

}  // namespace

std::string GatekeeperEntry::to_line() const {
  Json j{{"seq", seq}, {"ts", ts_ms}, {"broker", broker}, {"user_id", user_id},
         {"kind", kind}, {"params", params}};
  return j.dump();
}

GatekeeperEntry GatekeeperEntry::parse(std::string_view line) {
  Json j = parse_object(line);
  if (j.size() != 6) throw Error(ErrorCode::kMalformed, "unexpected gatekeeper fields");
  GatekeeperEntry e;
  e.seq = take<std::uint64_t>(j, "seq");
  e.ts_ms = take<std::int64_t>(j, "ts");
  e.broker = take<int>(j, "broker");
  e.user_id = take<std::string>(j, "user_id");
  e.kind = take<std::string>(j, "kind");
  e.params = take<Json>(j, "params");
  if (!e.params.is_object()) throw Error(ErrorCode::kMalformed, "params must be an object");
  return e;
}

std::optional<std::string> GatekeeperEntry::field(std::string_view name) const {
  if (name == "user_id") return user_id;
  if (name == "kind") return kind;
  return param_field(params, name);
}

std::string BrokerLogEntry::canonical_body() const {
  Json j{{"seq", seq},       {"ts", ts_ms},         {"broker", broker},
         {"module", module}, {"action", action},    {"request", request},
         {"params", params}, {"prev_hash", prev_hash}};
  return j.dump();
}

std::string BrokerLogEntry::compute_hash() const {
  return to_hex(sha256(canonical_body() + prev_hash));
}

std::string BrokerLogEntry::to_line() const {
  Json j{{"seq", seq},       {"ts", ts_ms},         {"broker", broker},
         {"module", module}, {"action", action},    {"request", request},
         {"params", params}, {"prev_hash", prev_hash}, {"entry_hash", entry_hash}};
  return j.dump();
}

BrokerLogEntry BrokerLogEntry::parse(std::string_view line) {
  Json j = parse_object(line);
  if (j.size() != 9) throw Error(ErrorCode::kMalformed, "unexpected brokers-log fields");
  BrokerLogEntry e;
  e.seq = take<std::uint64_t>(j, "seq");
  e.ts_ms = take<std::int64_t>(j, "ts");
  e.broker = take<int>(j, "broker");
  e.module = take<std::string>(j, "module");
  e.action = take<std::string>(j, "action");
  e.request = take<std::uint64_t>(j, "request");
  e.params = take<Json>(j, "params");
  e.prev_hash = take<std::string>(j, "prev_hash");
  e.entry_hash = take<std::string>(j, "entry_hash");
  if (!e.params.is_object()) throw Error(ErrorCode::kMalformed, "params must be an object");
  return e;
}

std::optional<std::string> BrokerLogEntry::field(std::string_view name) const {
  if (name == "broker") return std::to_string(broker);
  if (name == "request") return std::to_string(request);
  if (name == "module") return module;
  if (name == "action") return action;
  return param_field(params, name);
}

const std::string& genesis_hash() {
  static const std::string h = to_hex(sha256(std::string_view("hab/brokers-log/genesis/v1")));
  return h;
}

void MemoryLogStorage::append(const std::string& line) {
  std::lock_guard lock(mu_);
  lines_.push_back(line);
}

std::vector<std::string> MemoryLogStorage::read_lines() const {
  std::lock_guard lock(mu_);
  return lines_;
}

std::optional<std::string> MemoryLogStorage::read_head() const {
  std::lock_guard lock(mu_);
  return head_;
}

void MemoryLogStorage::write_head(const std::string& head) {
  std::lock_guard lock(mu_);
  head_ = head;
}

void MemoryLogStorage::replace_line(std::size_t index, std::string line) {
  std::lock_guard lock(mu_);
  lines_.at(index) = std::move(line);
}

void MemoryLogStorage::truncate(std::size_t count) {
  std::lock_guard lock(mu_);
  if (count < lines_.size()) lines_.resize(count);
}

void MemoryLogStorage::insert_line(std::size_t index, std::string line) {
  std::lock_guard lock(mu_);
  lines_.insert(lines_.begin() + static_cast<std::ptrdiff_t>(std::min(index, lines_.size())),
                std::move(line));
}

FileLogStorage::FileLogStorage(std::filesystem::path path, bool sync)
    : path_(std::move(path)), sync_(sync) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
}

void FileLogStorage::append(const std::string& line) {
  std::lock_guard lock(mu_);
  int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0600);
  if (fd < 0) throw Error(ErrorCode::kAuditFailure, "cannot open log " + path_.string());
  std::string data = line + "\n";
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n <= 0) {
      ::close(fd);
      throw Error(ErrorCode::kAuditFailure, "short write to log " + path_.string());
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (sync_ && ::fdatasync(fd) != 0) {
    ::close(fd);
    throw Error(ErrorCode::kAuditFailure, "fdatasync failed for " + path_.string());
  }
  ::close(fd);
}

std::vector<std::string> FileLogStorage::read_lines() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  std::ifstream in(path_, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path_)) return out;
    throw Error(ErrorCode::kAuditFailure, "cannot read log " + path_.string());
  }
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::optional<std::string> FileLogStorage::read_head() const {
  std::lock_guard lock(mu_);
  std::ifstream in(path_.string() + ".head", std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void FileLogStorage::write_head(const std::string& head) {
  std::lock_guard lock(mu_);
  const std::string target = path_.string() + ".head";
  const std::string tmp = target + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << head;
    out.flush();
    if (!out) throw Error(ErrorCode::kAuditFailure, "cannot write log head " + target);
  }
  if (std::rename(tmp.c_str(), target.c_str()) != 0)
    throw Error(ErrorCode::kAuditFailure, "cannot replace log head " + target);
}

}  // namespace hab::audit
