#include "hab/broker/stack.h"

#include "hab/common/error.h"

namespace hab::broker {

Stack::Stack(const StackOptions& options) : options_(options) {
  if (options_.log_dir) {
    gk_storage_ = std::make_shared<audit::FileLogStorage>(*options_.log_dir / "gatekeeper.log",
                                                          options_.sync_logs);
    bl_storage_ = std::make_shared<audit::FileLogStorage>(*options_.log_dir / "brokers.log",
                                                          options_.sync_logs);
  } else {
    gk_storage_ = std::make_shared<audit::MemoryLogStorage>();
    bl_storage_ = std::make_shared<audit::MemoryLogStorage>();
  }
  rules_ = options_.rules_path ? audit::RuleSet::load(*options_.rules_path) : audit::RuleSet::defaults();
  rules_.set_window_ms(options_.window_ms);

  const Clock& clock = *options_.clock;
  RandomSource& rng = *options_.rng;

  BrokerServices s;
  s.clock = options_.clock;
  s.rng = options_.rng;
  s.db = store::Database::open(options_.db_path);
  s.access = std::make_shared<access::AccessControl>(s.db, options_.access, clock, rng);
  s.keys = std::make_shared<KeyManager>(s.db, options_.level, rng);
  s.mcp = std::make_shared<storage::MultiCloudProxy>(s.db, clock);
  for (const auto& c : options_.clouds) s.mcp->register_backend(c);
  s.gatekeeper = std::make_shared<audit::Gatekeeper>(gk_storage_, clock);
  s.brokers_log = std::make_shared<audit::BrokersLog>(bl_storage_, clock);
  s.alerts = std::make_shared<audit::AlertStore>(s.db, clock);
  s.authority = std::make_shared<AttributeAuthority>(
      options_.authority_name, crypto::ed25519_from_seed(rng.bytes(32)));
  s.grants = std::make_shared<GrantVerifier>();
  s.grants->trust(s.authority->name(), s.authority->public_key());

  BrokerConfig bc;
  bc.broker_count = options_.broker_count;
  bc.emergency_attribute = options_.emergency_attribute;
  broker_ = std::make_unique<Broker>(s, bc);
  inspector_ = std::make_unique<audit::InspectorService>(gk_storage_, bl_storage_, s.alerts, s.db, rules_);
}

Stack::~Stack() {
  if (inspector_) inspector_->stop();
}

}  // namespace hab::broker
