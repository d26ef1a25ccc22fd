#include "hab/broker/kmm.h"

#include "hab/common/error.h"

namespace hab::broker {

KeyManager::KeyManager(std::shared_ptr<store::Database> db, int level, RandomSource& rng)
    : db_(std::move(db)), rng_(rng) {
  db_->exec(R"sql(
CREATE TABLE IF NOT EXISTS abe_authority (
  id            INTEGER PRIMARY KEY CHECK (id = 1),
  level         INTEGER NOT NULL,
  public_params BLOB NOT NULL,
  master_secret BLOB NOT NULL
))sql");
  store::Transaction tx(*db_);
  {
    store::Statement st(*db_, "SELECT level, public_params, master_secret FROM abe_authority");
    if (st.step()) {
      if (st.col_int(0) != level)
        throw Error(ErrorCode::kInconsistentParams,
                    "stored authority is level " + std::to_string(st.col_int(0)));
      keys_.public_params = abe::PublicParams::deserialize(st.col_blob(1));
      keys_.master_secret = abe::MasterSecret::deserialize(st.col_blob(2));
      return;
    }
  }
  keys_ = abe::setup(level, rng_);
  store::Statement(*db_, "INSERT INTO abe_authority VALUES (1, ?, ?, ?)")
      .bind(1, static_cast<std::int64_t>(level))
      .bind(2, keys_.public_params.serialize())
      .bind(3, keys_.master_secret.serialize())
      .run();
  tx.commit();
}

abe::UserKey KeyManager::issue_key(const abe::AttributeSet& attributes) const {
  return abe::keygen(keys_.public_params, keys_.master_secret, attributes, rng_);
}

std::string self_attribute(const std::string& user_id) { return "self:" + user_id; }

}  // namespace hab::broker
