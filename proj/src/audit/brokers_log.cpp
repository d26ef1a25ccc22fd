#include "hab/audit/brokers_log.h"

#include <sstream>

#include "hab/common/bytes.h"
#include "hab/common/crypto.h"
#include "hab/common/error.h"

namespace hab::audit {

namespace {

struct Head {
  std::uint64_t seq = 0;
  std::string hash;
};

std::optional<Head> parse_head(const std::string& text) {
  std::istringstream in(text);
  Head h;
  if (!(in >> h.seq >> h.hash)) return std::nullopt;
  return h;
}

std::string format_head(std::uint64_t seq, const std::string& hash) {
  return std::to_string(seq) + " " + hash;
}

// Checks line `index` (0-based) on its own and against `prev_hash`.
std::optional<std::string> check_line(const std::string& line, std::size_t index,
                                      const std::string& prev_hash, std::string& entry_hash) {
  BrokerLogEntry e;
  try {
    e = BrokerLogEntry::parse(line);
  } catch (const std::exception& ex) {
    return std::string("unparseable entry: ") + ex.what();
  }
  if (e.to_line() != line) return "entry is not in canonical form";
  if (e.seq != index + 1) return "sequence number out of order";
  if (e.prev_hash != prev_hash) return "prev_hash does not link to the previous entry";
  if (e.compute_hash() != e.entry_hash) return "entry_hash does not match contents";
  entry_hash = e.entry_hash;
  return std::nullopt;
}

std::string stored_hash(const std::string& line) {
  try {
    return BrokerLogEntry::parse(line).entry_hash;
  } catch (const std::exception&) {
    return {};
  }
}

ChainStatus verify_range(const std::vector<std::string>& lines, std::uint64_t from,
                         std::uint64_t to, const std::optional<std::string>& head,
                         bool allow_tail = false) {
  std::string prev = (from <= 1 || from > to) ? genesis_hash() : stored_hash(lines[from - 2]);
  for (std::uint64_t seq = from; seq <= to; ++seq) {
    std::string hash;
    if (auto why = check_line(lines[seq - 1], seq - 1, prev, hash))
      return ChainStatus::broken(seq, *why);
    prev = hash;
  }
  if (head) {
    auto h = parse_head(*head);
    if (!h) return ChainStatus::broken(lines.size() + 1, "head pointer unreadable");
    if (h->seq > lines.size())
      return ChainStatus::broken(lines.size() + 1,
                                 "log truncated: head names entry " + std::to_string(h->seq));
    if (h->seq < lines.size() && !allow_tail)
      return ChainStatus::broken(h->seq + 1, "entries beyond the stored head");
    const std::string last = h->seq == 0 ? genesis_hash() : stored_hash(lines[h->seq - 1]);
    if (last != h->hash)
      return ChainStatus::broken(std::max<std::uint64_t>(h->seq, 1), "head hash mismatch");
  }
  return ChainStatus::ok();
}

}  // namespace

std::string module_name(Module m) {
  switch (m) {
    case Module::kDmm: return "DMM";
    case Module::kAacm: return "AACM";
    case Module::kKmm: return "KMM";
    case Module::kMcp: return "MCP";
  }
  return "?";
}

ChainStatus verify_lines(const std::vector<std::string>& lines,
                         const std::optional<std::string>& head, bool allow_tail) {
  return verify_range(lines, 1, lines.size(), head, allow_tail);
}

BrokersLog::BrokersLog(std::shared_ptr<LogStorage> storage, const Clock& clock)
    : storage_(std::move(storage)), clock_(clock), last_hash_(genesis_hash()) {
  const auto lines = storage_->read_lines();
  if (!lines.empty()) {
    // Resume after the last entry; a damaged tail is left for verify_chain to report.
    try {
      auto e = BrokerLogEntry::parse(lines.back());
      next_seq_ = e.seq + 1;
      last_hash_ = e.entry_hash;
    } catch (const Error&) {
      next_seq_ = lines.size() + 1;
      last_hash_ = to_hex(sha256(lines.back()));
    }
  }
}

BrokerLogEntry BrokersLog::append(int broker, Module module, const std::string& action,
                                  std::uint64_t request, Json params) {
  std::lock_guard lock(mu_);
  BrokerLogEntry e;
  e.seq = next_seq_;
  e.ts_ms = clock_.now_ms();
  e.broker = broker;
  e.module = module_name(module);
  e.action = action;
  e.request = request;
  e.params = params.is_null() ? Json::object() : std::move(params);
  e.prev_hash = last_hash_;
  e.entry_hash = e.compute_hash();
  storage_->append(e.to_line());
  storage_->write_head(format_head(e.seq, e.entry_hash));
  ++next_seq_;
  last_hash_ = e.entry_hash;
  return e;
}

ChainStatus BrokersLog::verify_chain(std::uint64_t from, std::uint64_t to) const {
  const auto lines = storage_->read_lines();
  const bool open_ended = to == 0;
  if (open_ended) to = lines.size();
  if (from == 0 || to > lines.size() || from > lines.size() + 1)
    throw Error(ErrorCode::kInvalidArgument, "range outside the log");
  if (from > to && !open_ended) return ChainStatus::ok();
  return verify_range(lines, from, to, open_ended ? storage_->read_head() : std::nullopt);
}

std::vector<BrokerLogEntry> BrokersLog::entries() const {
  std::vector<BrokerLogEntry> out;
  for (const auto& line : storage_->read_lines()) {
    try {
      out.push_back(BrokerLogEntry::parse(line));
    } catch (const Error&) {
    }
  }
  return out;
}

std::uint64_t BrokersLog::last_seq() const {
  std::lock_guard lock(mu_);
  return next_seq_ - 1;
}

}  // namespace hab::audit
