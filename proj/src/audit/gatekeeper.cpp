#include "hab/audit/gatekeeper.h"

#include "hab/common/error.h"

namespace hab::audit {

Gatekeeper::Gatekeeper(std::shared_ptr<LogStorage> storage, const Clock& clock)
    : storage_(std::move(storage)), clock_(clock) {
  const auto lines = storage_->read_lines();
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    try {
      next_seq_ = GatekeeperEntry::parse(*it).seq + 1;
      break;
    } catch (const Error&) {
    }
  }
}

std::uint64_t Gatekeeper::record(const std::string& user_id, const std::string& kind, Json params,
                                 int broker) {
  std::lock_guard lock(mu_);
  GatekeeperEntry e;
  e.seq = next_seq_;
  e.ts_ms = clock_.now_ms();
  e.broker = broker;
  e.user_id = user_id;
  e.kind = kind;
  e.params = params.is_null() ? Json::object() : std::move(params);
  storage_->append(e.to_line());
  ++next_seq_;
  return e.seq;
}

std::vector<GatekeeperEntry> Gatekeeper::entries() const {
  std::vector<GatekeeperEntry> out;
  for (const auto& line : storage_->read_lines()) {
    try {
      out.push_back(GatekeeperEntry::parse(line));
    } catch (const Error&) {
    }
  }
  return out;
}

std::uint64_t Gatekeeper::last_seq() const {
  std::lock_guard lock(mu_);
  return next_seq_ - 1;
}

}  // namespace hab::audit
